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

#include <vector>

#include "eracl/encoder.h"
#include "eracl/error.h"
#include "testing/gradcheck.h"

namespace eracl {
namespace {

EncoderConfig SmallEncoder() {
  EncoderConfig c;
  c.vocab_size = 12;
  c.model_dim = 16;
  c.num_heads = 2;
  c.num_layers = 2;
  c.ffn_dim = 32;
  c.max_length = 10;
  c.dropout = 0.1;
  return c;
}

const std::vector<int> kTokens = {3, 2, 5, 2, 7, 11};

TEST(EncoderTest, OutputShapes) {
  const EncoderParams p = EncoderParams::Init(SmallEncoder(), 3);
  const EncodingOutput out = Encode(kTokens, p, Mode::kEval);
  EXPECT_EQ(out.hidden.rows(), 6);
  EXPECT_EQ(out.hidden.cols(), 16);
  ASSERT_EQ(out.attention.size(), 2u);
  for (const auto& a : out.attention) {
    EXPECT_EQ(a.rows(), 6);
    EXPECT_EQ(a.cols(), 6);
  }
}

TEST(EncoderTest, AttentionRowsSumToOne) {
  const EncoderParams p = EncoderParams::Init(SmallEncoder(), 5);
  Rng rng(9);
  for (Mode mode : {Mode::kEval, Mode::kTrain}) {
    const EncodingOutput out = Encode(kTokens, p, mode, &rng);
    for (const auto& a : out.attention) {
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        EXPECT_NEAR(a.value().row(i).sum(), 1.0, 1e-6);
      }
    }
    const Matrix avg = AverageAttentionHeads(out.attention).value();
    for (Eigen::Index i = 0; i < avg.rows(); ++i) {
      EXPECT_NEAR(avg.row(i).sum(), 1.0, 1e-6);
    }
  }
}

TEST(EncoderTest, EvalIsDeterministic) {
  const EncoderParams p = EncoderParams::Init(SmallEncoder(), 5);
  const Matrix a = Encode(kTokens, p, Mode::kEval).hidden.value();
  const Matrix b = Encode(kTokens, p, Mode::kEval).hidden.value();
  EXPECT_EQ(a, b);
}

TEST(EncoderTest, TrainModeReplaysFromSeed) {
  const EncoderParams p = EncoderParams::Init(SmallEncoder(), 5);
  Rng r1(77), r2(77), r3(78);
  const Matrix a = Encode(kTokens, p, Mode::kTrain, &r1).hidden.value();
  const Matrix b = Encode(kTokens, p, Mode::kTrain, &r2).hidden.value();
  const Matrix c = Encode(kTokens, p, Mode::kTrain, &r3).hidden.value();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(EncoderTest, InitIsSeeded) {
  auto a = EncoderParams::Init(SmallEncoder(), 1);
  auto b = EncoderParams::Init(SmallEncoder(), 1);
  auto pa = a.Parameters();
  auto pb = b.Parameters();
  ASSERT_EQ(pa.size(), pb.size());
  for (size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].name, pb[i].name);
    EXPECT_EQ(pa[i].var->value(), pb[i].var->value());
  }
}

TEST(EncoderTest, RejectsBadInput) {
  const EncoderParams p = EncoderParams::Init(SmallEncoder(), 1);
  const std::vector<int> too_long(11, 3);
  try {
    Encode(too_long, p, Mode::kEval);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("exceeds"), std::string::npos);
  }
  EXPECT_THROW(Encode(std::vector<int>{}, p, Mode::kEval), Error);
  EXPECT_THROW(Encode(std::vector<int>{3, 12}, p, Mode::kEval), Error);

  MarkedDocument doc;
  doc.title = "Long one";
  doc.token_ids = too_long;
  try {
    Encode(doc, p, Mode::kEval);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("Long one"), std::string::npos);
  }
}

TEST(EncoderTest, ConfigValidation) {
  EncoderConfig c = SmallEncoder();
  c.num_heads = 3;
  EXPECT_THROW(c.Validate(), Error);
  c = SmallEncoder();
  c.dropout = 1.5;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_NO_THROW(SmallEncoder().Validate());
}

TEST(EncoderTest, GradientMatchesFiniteDifferences) {
  EncoderConfig cfg = SmallEncoder();
  cfg.dropout = 0.0;
  EncoderParams p = EncoderParams::Init(cfg, 11);
  Rng rng(4);
  const Matrix r = testing::RandomMatrix(6, 16, rng);
  const Matrix s = testing::RandomMatrix(6, 6, rng);
  auto loss = [&] {
    EncodingOutput out = Encode(kTokens, p, Mode::kEval);
    ag::Var total = ag::SumAll(ag::MulConst(out.hidden, r));
    for (const auto& a : out.attention) {
      total = ag::Add(total, ag::SumAll(ag::MulConst(a, s)));
    }
    return total;
  };
  const auto result = testing::CheckParameters(loss, p.Parameters());
  EXPECT_LT(result.worst_error, 1e-4) << result.worst_name;
}

}  // namespace
}  // namespace eracl
