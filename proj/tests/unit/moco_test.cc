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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <type_traits>
#include <vector>

#include "eracl/error.h"
#include "eracl/moco.h"
#include "testing/gradcheck.h"
#include "testing/oracles.h"

namespace eracl {
namespace {

using testing::RandomMatrix;
using testing::RandomUnit;

Matrix RandomUnitRows(int rows, int dim, Rng& rng) {
  Matrix m(rows, dim);
  for (int i = 0; i < rows; ++i) m.row(i) = RandomUnit(dim, rng);
  return m;
}

TEST(ProjectionTest, OutputIsUnitOrZero) {
  Rng rng(1);
  ProjectionParams p = ProjectionParams::Init(6, 4, 3);
  for (int i = 0; i < 50; ++i) {
    const RowVector x = Project(RandomMatrix(1, 6, rng), RandomMatrix(1, 6, rng), p);
    ASSERT_EQ(x.cols(), 4);
    const double n = x.norm();
    EXPECT_TRUE(std::abs(n - 1.0) < 1e-12 || n == 0.0);
    EXPECT_TRUE((x.array() >= 0.0).all());
  }
  p.b2.mutable_value().setConstant(-100.0);
  EXPECT_EQ(Project(RandomMatrix(1, 6, rng), RandomMatrix(1, 6, rng), p).norm(), 0.0);
}

TEST(ProjectionTest, VarMatchesValueAndGradChecks) {
  Rng rng(2);
  ProjectionParams p = ProjectionParams::Init(5, 3, 4);
  const ag::Var h = ag::Var::Constant(RandomMatrix(1, 5, rng));
  const ag::Var t = ag::Var::Constant(RandomMatrix(1, 5, rng));
  const RowVector expect = Project(RowVector(h.value()), RowVector(t.value()), p);
  EXPECT_LT((Project(h, t, p).value() - expect).cwiseAbs().maxCoeff(), 1e-14);
  const Matrix w = RandomMatrix(1, 3, rng);
  auto loss = [&] { return ag::SumAll(ag::MulConst(Project(h, t, p), w)); };
  if (expect.norm() > 0) {
    EXPECT_LT(testing::CheckParameters(loss, p.Parameters()).worst_error, 1e-6);
  }
}

TEST(QueueTest, FifoEvictionAndBound) {
  Rng rng(3);
  RelationQueueBank bank(2, 3, 4);
  std::vector<RowVector> keys;
  const int rel[] = {0};
  for (int i = 0; i < 10; ++i) {
    keys.push_back(RandomUnit(4, rng));
    EXPECT_TRUE(bank.Enqueue(keys.back(), rel));
    EXPECT_LE(bank.queue(0).size(), 3u);
  }
  ASSERT_EQ(bank.queue(0).size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(bank.queue(0)[i], keys[7 + i]);
  EXPECT_TRUE(bank.queue(1).empty());
  for (const auto& k : bank.queue(0)) EXPECT_NEAR(k.norm(), 1.0, 1e-12);
}

TEST(QueueTest, MultiLabelAndEmptySets) {
  Rng rng(4);
  RelationQueueBank bank(3, 5, 2);
  const RowVector k = RandomUnit(2, rng);
  EXPECT_FALSE(bank.Enqueue(k, {}));
  for (int r = 0; r < 3; ++r) EXPECT_TRUE(bank.queue(r).empty());
  const int both[] = {0, 2};
  EXPECT_TRUE(bank.Enqueue(k, both));
  EXPECT_EQ(bank.queue(0).size(), 1u);
  EXPECT_TRUE(bank.queue(1).empty());
  EXPECT_EQ(bank.queue(2).size(), 1u);
  EXPECT_EQ(bank.Gather(both).rows(), 2);
  EXPECT_FALSE(bank.Enqueue(RowVector::Zero(2), both));
  EXPECT_EQ(bank.queue(0).size(), 1u);
  EXPECT_THROW(bank.Enqueue(RowVector::Ones(2), both), Error);
}

TEST(QueueTest, StoredKeysAreDetached) {
  static_assert(std::is_same_v<std::decay_t<decltype(RelationQueueBank().queue(0)[0])>,
                               RowVector>);
  Rng rng(5);
  ag::Var anchor = ag::Var::Parameter(RandomUnit(3, rng));
  RelationQueueBank bank(1, 4, 3);
  const int rel[] = {0};
  bank.Enqueue(anchor.value(), rel);
  const RowVector before = bank.queue(0)[0];
  ag::Backward(InfoNce(anchor, bank.Gather(rel), Matrix(0, 3), 0.5));
  anchor.mutable_value() *= -1.0;
  EXPECT_EQ(bank.queue(0)[0], before);
}

TEST(QueueTest, ExportImportRoundTrip) {
  Rng rng(6);
  RelationQueueBank bank(2, 3, 3);
  const int r0[] = {0};
  const int r01[] = {0, 1};
  bank.Enqueue(RandomUnit(3, rng), r0);
  bank.Enqueue(RandomUnit(3, rng), r01);
  RelationQueueBank copy(2, 3, 3);
  copy.Import(bank.Export());
  for (int r = 0; r < 2; ++r) {
    ASSERT_EQ(copy.queue(r).size(), bank.queue(r).size());
    for (size_t i = 0; i < copy.queue(r).size(); ++i) {
      EXPECT_EQ(copy.queue(r)[i], bank.queue(r)[i]);
    }
  }
}

TEST(MomentumTest, EndpointsAndBlend) {
  Rng rng(7);
  const std::vector<Matrix> online = {RandomMatrix(3, 2, rng)};
  const Matrix start = RandomMatrix(3, 2, rng);
  std::vector<Matrix> shadow = {start};
  MomentumUpdate(online, shadow, 1.0);
  EXPECT_EQ(shadow[0], start);
  MomentumUpdate(online, shadow, 0.0);
  EXPECT_EQ(shadow[0], online[0]);
  shadow[0] = start;
  MomentumUpdate(online, shadow, 0.99);
  const Matrix expect = 0.99 * start + 0.01 * online[0];
  EXPECT_LT((shadow[0] - expect).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(MomentumUpdate(online, shadow, 1.5), Error);
}

TEST(MomentumTest, GeometricConvergenceBound) {
  Rng rng(8);
  for (double m : {0.5, 0.9, 0.99}) {
    const std::vector<Matrix> online = {RandomMatrix(4, 4, rng)};
    std::vector<Matrix> shadow = {RandomMatrix(4, 4, rng)};
    const double d0 = (shadow[0] - online[0]).cwiseAbs().maxCoeff();
    for (int n = 1; n <= 200; ++n) {
      MomentumUpdate(online, shadow, m);
      const double dn = (shadow[0] - online[0]).cwiseAbs().maxCoeff();
      ASSERT_LE(dn, std::pow(m, n) * d0 + 1e-9) << m << " " << n;
    }
  }
}

TEST(InfoNceTest, ClosedFormCases) {
  RowVector x(2);
  x << 1.0, 0.0;
  Matrix pos = x;
  Matrix neg = x;
  EXPECT_NEAR(InfoNce(x, pos, neg, 0.5), std::log(2.0), 1e-15);
  EXPECT_NEAR(InfoNce(x, pos, Matrix(0, 2), 0.5), 0.0, 1e-15);
  EXPECT_EQ(InfoNce(x, Matrix(0, 2), neg, 0.5), 0.0);
  EXPECT_THROW(InfoNce(x, pos, neg, 0.0), Error);
  EXPECT_THROW(InfoNce(x, pos, neg, -1.0), Error);
}

TEST(InfoNceTest, MatchesOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + static_cast<int>(rng.UniformInt(8));
    const RowVector x = RandomUnit(d, rng);
    const Matrix p = RandomUnitRows(1 + static_cast<int>(rng.UniformInt(5)), d, rng);
    const Matrix n = RandomUnitRows(static_cast<int>(rng.UniformInt(8)), d, rng);
    const double tau = 0.05 + rng.Uniform();
    ASSERT_TRUE(testing::Close(InfoNce(x, p, n, tau),
                               testing::InfoNceOracle(x, p, n, tau)));
  }
}

TEST(InfoNceTest, MonotoneInNegativeSimilarity) {
  Rng rng(10);
  const RowVector x = RandomUnit(4, rng);
  const Matrix p = RandomUnitRows(2, 4, rng);
  const RowVector other = RandomUnit(4, rng);
  double last = -1.0;
  for (double a = 0.0; a <= 1.0; a += 0.1) {
    RowVector n = (1.0 - a) * other + a * x;
    n /= n.norm();
    const double l = InfoNce(x, p, Matrix(n), 0.5);
    EXPECT_GT(l, last);
    last = l;
  }
}

TEST(InfoNceTest, InvariantToKeyOrder) {
  Rng rng(11);
  const RowVector x = RandomUnit(5, rng);
  Matrix p = RandomUnitRows(4, 5, rng);
  Matrix n = RandomUnitRows(6, 5, rng);
  const double base = InfoNce(x, p, n, 0.3);
  p.row(0).swap(p.row(3));
  n.row(1).swap(n.row(5));
  n.row(0).swap(n.row(2));
  EXPECT_NEAR(InfoNce(x, p, n, 0.3), base, 1e-13);
}

TEST(InfoNceTest, GradientMatchesFiniteDifferences) {
  Rng rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    ag::Var x = ag::Var::Parameter(RandomMatrix(1, 6, rng));
    const Matrix p = RandomUnitRows(3, 6, rng);
    const Matrix n = RandomUnitRows(5, 6, rng);
    std::vector<NamedParam> params = {{"x", &x, ParamGroup::kProjection, true}};
    const auto r = testing::CheckParameters([&] { return InfoNce(x, p, n, 0.4); },
                                            params);
    EXPECT_LT(r.worst_error, 1e-4);
    RowVector g;
    InfoNce(RowVector(x.value()), p, n, 0.4, &g);
    x.ZeroGrad();
    ag::Backward(InfoNce(x, p, n, 0.4));
    EXPECT_LT((x.grad() - g).cwiseAbs().maxCoeff(), 1e-13);
  }
}

}  // namespace
}  // namespace eracl
