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

#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "eracl/autograd.h"
#include "eracl/encoder.h"

namespace eracl {
namespace {

EncoderParams MakeEncoder(int d, int layers) {
  EncoderConfig cfg;
  cfg.vocab_size = 256;
  cfg.model_dim = d;
  cfg.num_heads = 4;
  cfg.num_layers = layers;
  cfg.ffn_dim = 4 * d;
  return EncoderParams::Init(cfg, 1);
}

std::vector<int> Tokens(int length) {
  std::vector<int> ids(length);
  for (int i = 0; i < length; ++i) ids[i] = 4 + (i * 37) % 250;
  return ids;
}

void BM_EncodeEval(benchmark::State& state) {
  const EncoderParams params = MakeEncoder(static_cast<int>(state.range(1)), 2);
  const std::vector<int> ids = Tokens(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    EncodingOutput out = Encode(ids, params, Mode::kEval);
    benchmark::DoNotOptimize(out.hidden.value().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeEval)->ArgsProduct({{64, 128, 256, 512}, {32, 64}});

// Forward and backward through the encoder.
void BM_EncodeTrainStep(benchmark::State& state) {
  EncoderParams params = MakeEncoder(64, 2);
  const std::vector<int> ids = Tokens(static_cast<int>(state.range(0)));
  Rng rng(3);
  for (auto _ : state) {
    EncodingOutput out = Encode(ids, params, Mode::kTrain, &rng);
    ag::Backward(ag::SumAll(out.hidden));
    for (auto& p : params.Parameters()) p.var->ZeroGrad();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EncodeTrainStep)->Arg(64)->Arg(256);

}  // namespace
}  // namespace eracl
