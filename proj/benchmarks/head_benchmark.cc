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

#include <benchmark/benchmark.h>

#include "eracl/moco.h"
#include "eracl/random.h"
#include "eracl/relation_head.h"

namespace eracl {
namespace {

Matrix Gaussian(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = rng.Normal();
  }
  return m;
}

Matrix UnitRows(int rows, int cols, Rng& rng) {
  Matrix m = Gaussian(rows, cols, rng);
  for (int i = 0; i < rows; ++i) m.row(i).normalize();
  return m;
}

// Range: model dim, groups.
void BM_GroupedBilinearSingle(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  HeadParams params = HeadParams::Init({d, 96, static_cast<int>(state.range(1))}, 1);
  Rng rng(2);
  const RowVector h = Gaussian(1, d, rng), t = Gaussian(1, d, rng);
  for (auto _ : state) benchmark::DoNotOptimize(Score(h, t, params).data());
}
BENCHMARK(BM_GroupedBilinearSingle)->ArgsProduct({{64, 256, 768}, {8, 64}});

// All pairs of a document with 20 entities.
void BM_GroupedBilinearBatched(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int pairs = 380;
  HeadParams params = HeadParams::Init({d, 96, 8}, 1);
  Rng rng(2);
  const ag::Var h = ag::Var::Constant(Gaussian(pairs, d, rng));
  const ag::Var t = ag::Var::Constant(Gaussian(pairs, d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(Score(h, t, params).value().data());
  state.SetItemsProcessed(state.iterations() * pairs);
}
BENCHMARK(BM_GroupedBilinearBatched)->Arg(64)->Arg(256);

// Range: queue length per relation, number of relations.
void BM_InfoNce(benchmark::State& state) {
  const int q = static_cast<int>(state.range(0));
  const int relations = static_cast<int>(state.range(1));
  Rng rng(4);
  const RowVector x = UnitRows(1, 64, rng);
  const Matrix positives = UnitRows(q, 64, rng);
  const Matrix negatives = UnitRows(q * (relations - 1), 64, rng);
  RowVector grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(InfoNce(x, positives, negatives, 0.5, &grad));
  }
}
BENCHMARK(BM_InfoNce)->ArgsProduct({{64, 500}, {8, 96}});

void BM_AtlLoss(benchmark::State& state) {
  Rng rng(5);
  const RowVector scores = Gaussian(1, 97, rng);
  const std::vector<int> positives = {3, 17};
  for (auto _ : state) benchmark::DoNotOptimize(AtlLoss(scores, positives));
}
BENCHMARK(BM_AtlLoss);

}  // namespace
}  // namespace eracl
