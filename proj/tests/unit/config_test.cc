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

#include "cli.h"
#include "eracl/config.h"
#include "eracl/error.h"

namespace eracl {
namespace {

TEST(ConfigTest, KeyValueRoundTrip) {
  TrainConfig c;
  c.era_p = 0.125;
  c.era_relations = {"P17", "P131"};
  c.use_cl = false;
  c.seed = 123456789012345ULL;
  c.lr_head = 3.3e-5;
  TrainConfig back;
  for (const auto& [k, v] : c.ToKeyValues()) back.Set(k, v);
  EXPECT_EQ(back.ToKeyValues(), c.ToKeyValues());
  EXPECT_EQ(back.era_relations, c.era_relations);
  EXPECT_EQ(back.lr_head, c.lr_head);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(TrainConfig::Keys().size(), c.ToKeyValues().size());
}

TEST(ConfigTest, RejectsUnknownKeysAndBadValues) {
  TrainConfig c;
  EXPECT_THROW(c.Set("no_such_key", "1"), Error);
  EXPECT_THROW(c.Set("era_p", "abc"), Error);
  EXPECT_THROW(c.Set("use_era", "maybe"), Error);
  EXPECT_THROW(c.Set("batch_size", "2.5"), Error);
  try {
    c.Set("no_such_key", "1");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUsage);
  }
}

TEST(ConfigTest, ValidateRanges) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.era_p = 1.5;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig();
  c.cl_tau = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig();
  c.bilinear_groups = 7;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(ConfigTest, Profiles) {
  for (const auto& name : ProfileNames()) EXPECT_NO_THROW(Profile(name).Validate());
  const TrainConfig published = Profile("paper-defaults");
  EXPECT_EQ(published.model_dim, 768);
  EXPECT_EQ(published.bilinear_groups, 64);
  EXPECT_EQ(published.era_alpha, 2);
  EXPECT_DOUBLE_EQ(published.era_p, 0.1);
  EXPECT_DOUBLE_EQ(published.cl_tau, 0.5);
  EXPECT_DOUBLE_EQ(published.cl_momentum, 0.99);
  EXPECT_EQ(published.cl_queue_size, 500);
  EXPECT_DOUBLE_EQ(published.lr_backbone, 5e-5);
  EXPECT_DOUBLE_EQ(published.lr_head, 1e-4);
  EXPECT_DOUBLE_EQ(published.warmup_ratio, 0.06);
  EXPECT_EQ(published.era_threshold, 200);
  EXPECT_THROW(Profile("huge"), Error);
}

TEST(ConfigTest, ParseKeyValues) {
  const auto kv = ParseKeyValues("# header\nera_p = 0.2  # inline\n\n  seed=4\n");
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("era_p"), "0.2");
  EXPECT_EQ(kv.at("seed"), "4");
  EXPECT_THROW(ParseKeyValues("just words"), Error);
  EXPECT_EQ(ParseKeyValues(FormatKeyValues(kv)), kv);
}

TEST(ConfigTest, ThreeLayerPrecedence) {
  // defaults < file < command line, each layer touching some keys.
  const std::string file = "era_p = 0.3\nera_alpha = 5\n";
  const TrainConfig c = cli::ResolveConfig("", file, {{"era_alpha", "7"}});
  EXPECT_DOUBLE_EQ(c.era_p, 0.3);
  EXPECT_EQ(c.era_alpha, 7);
  EXPECT_EQ(c.batch_size, TrainConfig().batch_size);
}

TEST(ConfigTest, ProfileLayer) {
  const TrainConfig from_flag = cli::ResolveConfig("desk", "", {});
  EXPECT_DOUBLE_EQ(from_flag.lr_backbone, Profile("desk").lr_backbone);
  const TrainConfig from_file =
      cli::ResolveConfig("", "profile = paper-defaults\nera_alpha = 3\n", {});
  EXPECT_EQ(from_file.model_dim, 768);
  EXPECT_EQ(from_file.era_alpha, 3);
  const TrainConfig flag_wins =
      cli::ResolveConfig("desk", "profile = paper-defaults\n", {});
  EXPECT_EQ(flag_wins.model_dim, Profile("desk").model_dim);
  EXPECT_THROW(cli::ResolveConfig("", "", {{"era_p", "2"}}), Error);
}

}  // namespace
}  // namespace eracl
