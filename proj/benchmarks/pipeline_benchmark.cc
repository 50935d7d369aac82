// Copyright 2026 The ERACL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "eracl/config.h"
#include "eracl/corpus.h"
#include "eracl/pipeline.h"

namespace eracl {
namespace {

struct Fixture {
  TrainConfig config;
  Corpus corpus;
  Vocabulary vocab;
  RelationScheme scheme;
  std::vector<PreparedDocument> docs;

  explicit Fixture(int model_dim) {
    config = Profile("desk");
    config.model_dim = model_dim;
    config.ffn_dim = 4 * model_dim;
    SynthSpec spec;
    spec.num_documents = 8;
    corpus = GenerateSynthetic(spec, 1);
    vocab = Vocabulary::Build(corpus);
    scheme = SyntheticScheme(spec.num_relations);
    docs = PrepareCorpus(corpus, vocab, scheme, config.max_length, -1.0, 1);
  }
};

// One optimizer-free fine-tuning step on a batch of four documents.
void BM_FinetuneStep(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  Model model = Model::Init(f.config, f.vocab.size(), f.scheme.size());
  EraConfig era{0.1, 2, std::vector<bool>(f.scheme.size(), true)};
  const bool use_era = state.range(1) != 0;
  std::vector<const PreparedDocument*> batch = {&f.docs[0], &f.docs[1], &f.docs[2],
                                                &f.docs[3]};
  uint64_t stream = 0;
  for (auto _ : state) {
    BatchLoss loss = FinetuneLoss(model, batch, use_era ? &era : nullptr, Mode::kTrain,
                                  ++stream);
    ag::Backward(loss.loss);
    for (auto& p : model.Parameters()) p.var->ZeroGrad();
  }
}
BENCHMARK(BM_FinetuneStep)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PredictCorpus(benchmark::State& state) {
  Fixture f(64);
  const Model model = Model::Init(f.config, f.vocab.size(), f.scheme.size());
  for (auto _ : state) {
    PredictionSet pred = PredictCorpus(model, f.corpus, f.vocab, f.config.max_length);
    benchmark::DoNotOptimize(pred.size());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f.corpus.documents.size()));
}
BENCHMARK(BM_PredictCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace eracl
