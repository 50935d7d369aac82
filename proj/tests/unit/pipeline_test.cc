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
#include <sstream>
#include <string>
#include <vector>

#include "eracl/checkpoint.h"
#include "eracl/error.h"
#include "eracl/pipeline.h"
#include "testing/fixtures.h"
#include "testing/gradcheck.h"

namespace eracl {
namespace {

using testing::MicroConfig;

struct Corpora {
  Corpus train;
  Corpus distant;
  Vocabulary vocab;
  RelationScheme scheme;
};

Corpora MakeCorpora(int relations = 4) {
  Corpora s;
  s.train = GenerateSynthetic(testing::SmallSpec(8, relations), 3);
  s.distant = GenerateSynthetic(testing::SmallSpec(8, relations), 4);
  Corpus both = s.train;
  both.documents.insert(both.documents.end(), s.distant.documents.begin(),
                        s.distant.documents.end());
  s.vocab = Vocabulary::Build(both);
  s.scheme = SyntheticScheme(relations);
  return s;
}

TEST(ScheduleTest, WarmupThenLinearDecay) {
  EXPECT_DOUBLE_EQ(LrSchedule(0, 100, 0.06, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(LrSchedule(3, 100, 0.06, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(LrSchedule(6, 100, 0.06, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(LrSchedule(53, 100, 0.06, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(LrSchedule(100, 100, 0.06, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(LrSchedule(0, 10, 0.06, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(LrSchedule(0, 0, 0.06, 1.0), 0.0);
}

TEST(ClipTest, ScalesToMaxNorm) {
  std::vector<Matrix> g = {Matrix::Constant(1, 1, 3.0), Matrix::Constant(1, 1, 4.0)};
  EXPECT_DOUBLE_EQ(ClipGradients(g, 1.0), 5.0);
  EXPECT_NEAR(g[0](0, 0), 0.6, 1e-15);
  EXPECT_NEAR(g[1](0, 0), 0.8, 1e-15);
  std::vector<Matrix> small = {Matrix::Constant(1, 2, 0.1)};
  ClipGradients(small, 1.0);
  EXPECT_EQ(small[0](0, 1), 0.1);
}

TEST(AdamWTest, SingleStepMatchesHandComputation) {
  ag::Var backbone = ag::Var::Parameter(Matrix::Constant(1, 2, 1.0));
  ag::Var head = ag::Var::Parameter(Matrix::Constant(1, 1, -2.0));
  ag::Var bias = ag::Var::Parameter(Matrix::Constant(1, 1, 0.5));
  ag::Var untouched = ag::Var::Parameter(Matrix::Constant(1, 1, 7.0));
  backbone.mutable_grad() = (Matrix(1, 2) << 0.5, -0.25).finished();
  head.mutable_grad() = Matrix::Constant(1, 1, 2.0);
  bias.mutable_grad() = Matrix::Constant(1, 1, -1.0);
  const std::vector<NamedParam> params = {
      {"backbone", &backbone, ParamGroup::kBackbone, true},
      {"head", &head, ParamGroup::kHead, true},
      {"bias", &bias, ParamGroup::kHead, false},
      {"untouched", &untouched, ParamGroup::kHead, true}};
  AdamW opt({0.9, 0.999, 1e-8, 0.01});
  const double lr_b = 1e-3, lr_h = 1e-2;
  opt.Step(params, [&](ParamGroup g) { return g == ParamGroup::kBackbone ? lr_b : lr_h; });
  // Step one: m_hat = g and v_hat = g^2, so the update is lr * g / (|g| + eps).
  auto expect = [](double w, double g, double lr, double wd) {
    return w * (1.0 - lr * wd) - lr * g / (std::abs(g) + 1e-8);
  };
  EXPECT_NEAR(backbone.value()(0, 0), expect(1.0, 0.5, lr_b, 0.01), 1e-15);
  EXPECT_NEAR(backbone.value()(0, 1), expect(1.0, -0.25, lr_b, 0.01), 1e-15);
  EXPECT_NEAR(head.value()(0, 0), expect(-2.0, 2.0, lr_h, 0.01), 1e-15);
  EXPECT_NEAR(bias.value()(0, 0), expect(0.5, -1.0, lr_h, 0.0), 1e-15);
  EXPECT_EQ(untouched.value()(0, 0), 7.0);
  EXPECT_EQ(opt.steps(), 1);

  // Step two with a fresh gradient, against the bias-corrected moments.
  head.mutable_grad() = Matrix::Constant(1, 1, -1.0);
  backbone.ZeroGrad();
  bias.ZeroGrad();
  const double w1 = head.value()(0, 0);
  opt.Step(params, [&](ParamGroup) { return lr_h; });
  const double m = 0.9 * 0.1 * 2.0 + 0.1 * -1.0;
  const double v = 0.999 * 0.001 * 4.0 + 0.001 * 1.0;
  const double mh = m / (1 - 0.81), vh = v / (1 - 0.999 * 0.999);
  EXPECT_NEAR(head.value()(0, 0),
              w1 * (1 - lr_h * 0.01) - lr_h * mh / (std::sqrt(vh) + 1e-8), 1e-15);
}

TEST(AdamWTest, ExportImportRestoresMoments) {
  ag::Var w = ag::Var::Parameter(Matrix::Constant(2, 2, 1.0));
  std::vector<NamedParam> params = {{"w", &w, ParamGroup::kHead, true}};
  AdamW a;
  w.mutable_grad() = Matrix::Constant(2, 2, 0.3);
  a.Step(params, [](ParamGroup) { return 0.1; });
  TensorArchive ar;
  a.Export("adam/", ar);
  AdamW b;
  b.Import("adam/", ar, params, a.steps());
  ag::Var w2 = ag::Var::Parameter(w.value());
  std::vector<NamedParam> p2 = {{"w", &w2, ParamGroup::kHead, true}};
  w.mutable_grad() = Matrix::Constant(2, 2, -0.7);
  w2.mutable_grad() = Matrix::Constant(2, 2, -0.7);
  a.Step(params, [](ParamGroup) { return 0.1; });
  b.Step(p2, [](ParamGroup) { return 0.1; });
  EXPECT_EQ(w.value(), w2.value());
}

TEST(PrepareTest, PairsAndNegatives) {
  const Corpus tiny = ParseDocRed(testing::kTinyDocRed);
  const RelationScheme scheme = RelationScheme::FromCorpus(tiny);
  const Vocabulary vocab = Vocabulary::Build(tiny);
  const auto all = PrepareCorpus(tiny, vocab, scheme, 64, -1.0, 1);
  ASSERT_EQ(all.size(), 1u);
  EXPECT_EQ(all[0].num_labeled, 1);
  ASSERT_EQ(all[0].pairs.size(), 2u);
  EXPECT_TRUE(all[0].pairs[1].relations.empty());
  EXPECT_EQ(PrepareCorpus(tiny, vocab, scheme, 64, 0.0, 1)[0].pairs.size(), 1u);
  EXPECT_THROW(PrepareCorpus(tiny, vocab, SyntheticScheme(2), 64, -1.0, 1), Error);
}

TEST(AugmentSetTest, ExplicitListOrThreshold) {
  const RelationScheme scheme = SyntheticScheme(4);
  const std::vector<int64_t> freq = {500, 100, 199, 200};
  TrainConfig c;
  EXPECT_EQ(ResolveAugmentSet(c, scheme, freq),
            (std::vector<bool>{false, true, true, false}));
  c.era_relations = {"R0"};
  EXPECT_EQ(ResolveAugmentSet(c, scheme, freq),
            (std::vector<bool>{true, false, false, false}));
  c.era_relations = {"P1"};
  EXPECT_THROW(ResolveAugmentSet(c, scheme, freq), Error);
}

TEST(FinetuneLossTest, TripleCountInvariant) {
  const Corpora s = MakeCorpora();
  TrainConfig cfg = MicroConfig();
  const Model model = Model::Init(cfg, s.vocab.size(), s.scheme.size());
  const auto docs = PrepareCorpus(s.train, s.vocab, s.scheme, cfg.max_length,
                                  cfg.negative_ratio, cfg.seed);
  std::vector<const PreparedDocument*> batch;
  int64_t pairs = 0;
  for (const auto& d : docs) {
    batch.push_back(&d);
    pairs += static_cast<int64_t>(d.pairs.size());
  }
  EraConfig era{0.1, 2, {true, false, true, false}};
  int64_t qualifying = 0;
  for (const auto& d : docs) {
    for (const auto& p : d.pairs) qualifying += era.Qualifies(p.relations);
  }
  const BatchLoss plain = FinetuneLoss(model, batch, nullptr, Mode::kTrain, 5);
  EXPECT_EQ(plain.triples, pairs);
  EXPECT_EQ(plain.augmented, 0);
  const BatchLoss aug = FinetuneLoss(model, batch, &era, Mode::kTrain, 5);
  EXPECT_EQ(aug.augmented, 2 * qualifying);
  EXPECT_EQ(aug.triples, pairs + aug.augmented);
  EXPECT_TRUE(std::isfinite(aug.loss.scalar()));
}

TEST(FinetuneLossTest, WorkerCountDoesNotChangeLoss) {
  const Corpora s = MakeCorpora();
  TrainConfig cfg = MicroConfig();
  const Model model = Model::Init(cfg, s.vocab.size(), s.scheme.size());
  const auto docs = PrepareCorpus(s.train, s.vocab, s.scheme, cfg.max_length, -1.0, 1);
  std::vector<const PreparedDocument*> batch;
  for (const auto& d : docs) batch.push_back(&d);
  EraConfig era{0.1, 2, {true, true, true, true}};
  const double one = FinetuneLoss(model, batch, &era, Mode::kTrain, 9, 1).loss.scalar();
  const double four = FinetuneLoss(model, batch, &era, Mode::kTrain, 9, 4).loss.scalar();
  EXPECT_EQ(one, four);
}

TEST(FinetuneLossTest, FullModelGradientMatchesFiniteDifferences) {
  const Corpus tiny = ParseDocRed(testing::kTinyDocRed);
  const RelationScheme scheme = SyntheticScheme(3);
  Corpus relabeled = tiny;
  relabeled.documents[0].labels[0].relations = {"R1"};
  const Vocabulary vocab = Vocabulary::Build(relabeled);
  TrainConfig cfg = MicroConfig();
  cfg.max_length = 32;
  Model model = Model::Init(cfg, vocab.size(), scheme.size());
  // Larger weights than the default init, so every path carries signal.
  Rng rng(3);
  for (auto& p : model.FinetuneParameters()) {
    p.var->mutable_value() += testing::RandomMatrix(p.var->rows(), p.var->cols(), rng, 0.3);
  }
  const auto docs = PrepareCorpus(relabeled, vocab, scheme, cfg.max_length, -1.0, 1);
  ASSERT_LE(docs[0].marked.length(), 32);
  ASSERT_EQ(docs[0].pairs.size(), 2u);
  const PreparedDocument* batch[] = {&docs[0]};
  EraConfig era{0.3, 2, {false, true, false}};
  auto loss = [&] { return FinetuneLoss(model, batch, &era, Mode::kTrain, 17).loss; };
  const auto r = testing::CheckParameters(loss, model.FinetuneParameters());
  EXPECT_LT(r.worst_error, 1e-3) << r.worst_name;
}

TEST(ContrastiveLossTest, ColdStartIsFiniteAndFillsQueues) {
  const Corpora s = MakeCorpora();
  TrainConfig cfg = MicroConfig();
  const Model online = Model::Init(cfg, s.vocab.size(), s.scheme.size());
  const Model shadow = online.Clone(false);
  const auto docs = PrepareCorpus(s.distant, s.vocab, s.scheme, cfg.max_length, 0.0, 1);
  std::vector<const PreparedDocument*> batch = {&docs[0], &docs[1]};
  RelationQueueBank bank(s.scheme.size(), cfg.cl_queue_size, cfg.proj_dim());
  const BatchLoss l = ContrastiveLoss(online, shadow, batch, nullptr, 0.5, bank, 1);
  ASSERT_TRUE(l.loss.defined());
  EXPECT_TRUE(std::isfinite(l.loss.scalar()));
  EXPECT_GT(l.triples, 0);
  int stored = 0;
  for (int r = 0; r < bank.num_relations(); ++r) {
    stored += static_cast<int>(bank.queue(r).size());
    EXPECT_LE(bank.queue(r).size(), static_cast<size_t>(cfg.cl_queue_size));
  }
  EXPECT_GT(stored, 0);
}

std::string SnapshotBytes(const Trainer& t) { return EncodeArchive(t.Snapshot()); }

TEST(TrainerTest, PretrainRequiresLabels) {
  Corpora s = MakeCorpora();
  for (auto& d : s.distant.documents) d.labels.clear();
  Trainer t(MicroConfig(), s.vocab, s.scheme);
  try {
    t.Pretrain(s.distant);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
  }
  TrainConfig no_cl = MicroConfig();
  no_cl.use_cl = false;
  Trainer u(no_cl, s.vocab, s.scheme);
  EXPECT_THROW(u.Pretrain(MakeCorpora().distant), Error);
}

TEST(TrainerTest, PretrainColdStart) {
  const Corpora s = MakeCorpora();
  Trainer t(MicroConfig(), s.vocab, s.scheme);
  EXPECT_TRUE(t.Pretrain(s.distant));
  ASSERT_EQ(t.pretrain_history().epoch_losses.size(), 2u);
  for (double l : t.pretrain_history().epoch_losses) {
    EXPECT_TRUE(std::isfinite(l));
    EXPECT_GT(l, 0.0);
  }
  ASSERT_NE(t.shadow(), nullptr);
}

TEST(TrainerTest, PretrainLossDecreasesOverTwentyEpochs) {
  int decreased = 0;
  std::ostringstream curves;
  for (uint64_t seed : {1u, 2u, 3u}) {
    const Corpus distant = GenerateSynthetic(testing::SmallSpec(24, 4), 40 + seed);
    TrainConfig cfg = MicroConfig();
    cfg.pretrain_epochs = 20;
    cfg.max_length = 128;
    // Queues fill early in the first epoch, so the loss scale is comparable.
    cfg.cl_queue_size = 4;
    cfg.seed = seed;
    Trainer t(cfg, Vocabulary::Build(distant), SyntheticScheme(4));
    t.Pretrain(distant);
    const auto& losses = t.pretrain_history().epoch_losses;
    ASSERT_EQ(losses.size(), 20u);
    decreased += losses.back() < losses.front();
    curves << "seed " << seed << ": " << losses.front() << " -> " << losses.back() << "\n";
  }
  EXPECT_GE(decreased, 2) << curves.str();
}

TEST(TrainerTest, RunsAreBitwiseReproducible) {
  const Corpora s = MakeCorpora();
  auto run = [&](std::vector<std::string>& log) {
    Trainer t(MicroConfig(), s.vocab, s.scheme);
    t.set_metrics_sink([&](const MetricsRecord& r) { log.push_back(MetricsJsonLine(r)); });
    t.Pretrain(s.distant);
    t.Finetune(s.train, &s.train);
    return SnapshotBytes(t);
  };
  std::vector<std::string> log_a, log_b;
  const std::string a = run(log_a);
  const std::string b = run(log_b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(log_a, log_b);
  EXPECT_FALSE(log_a.empty());
}

TEST(TrainerTest, SeedChangesRun) {
  const Corpora s = MakeCorpora();
  TrainConfig other = MicroConfig();
  other.seed = 2;
  Trainer a(MicroConfig(), s.vocab, s.scheme), b(other, s.vocab, s.scheme);
  a.Finetune(s.train, nullptr);
  b.Finetune(s.train, nullptr);
  EXPECT_NE(SnapshotBytes(a), SnapshotBytes(b));
}

void ExpectResumeMatches(bool pretrain, int64_t cut) {
  const Corpora s = MakeCorpora();
  std::vector<std::string> full_log, resumed_log;
  Trainer full(MicroConfig(), s.vocab, s.scheme);
  full.set_metrics_sink([&](const MetricsRecord& r) { full_log.push_back(MetricsJsonLine(r)); });
  if (pretrain) {
    full.Pretrain(s.distant);
  } else {
    full.Finetune(s.train, &s.train);
  }

  Trainer first(MicroConfig(), s.vocab, s.scheme);
  first.set_metrics_sink([&](const MetricsRecord& r) { resumed_log.push_back(MetricsJsonLine(r)); });
  const bool done = pretrain ? first.Pretrain(s.distant, cut)
                             : first.Finetune(s.train, &s.train, cut);
  ASSERT_FALSE(done);
  EXPECT_EQ(first.state().step, cut);
  Trainer second = Trainer::Restore(DecodeArchive(SnapshotBytes(first)));
  second.set_metrics_sink([&](const MetricsRecord& r) { resumed_log.push_back(MetricsJsonLine(r)); });
  ASSERT_TRUE(pretrain ? second.Pretrain(s.distant) : second.Finetune(s.train, &s.train));
  EXPECT_EQ(SnapshotBytes(second), SnapshotBytes(full));
  EXPECT_EQ(resumed_log, full_log);
}

TEST(TrainerTest, FinetuneResumesMidEpoch) { ExpectResumeMatches(false, 3); }
TEST(TrainerTest, FinetuneResumesAtEpochBoundary) { ExpectResumeMatches(false, 4); }
TEST(TrainerTest, PretrainResumesMidEpoch) { ExpectResumeMatches(true, 5); }

TEST(TrainerTest, ProjectionDoesNotAffectFinetune) {
  const Corpora s = MakeCorpora();
  Trainer a(MicroConfig(), s.vocab, s.scheme), b(MicroConfig(), s.vocab, s.scheme);
  b.model().projection.w1.mutable_value().array() += 0.5;
  a.Finetune(s.train, &s.train);
  b.Finetune(s.train, &s.train);
  auto pa = a.model().FinetuneParameters();
  auto pb = b.model().FinetuneParameters();
  for (size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].var->value(), pb[i].var->value()) << pa[i].name;
  }
  EXPECT_EQ(a.finetune_history().epoch_losses, b.finetune_history().epoch_losses);
}

TEST(TrainerTest, PretrainedWeightsCarryOver) {
  const Corpora s = MakeCorpora();
  Trainer pre(MicroConfig(), s.vocab, s.scheme);
  pre.Pretrain(s.distant);
  TrainConfig ft = MicroConfig();
  ft.lr_head = 5e-3;
  Trainer t = Trainer::FromPretrained(pre.Snapshot(), ft);
  auto a = pre.model().Parameters();
  auto b = t.model().Parameters();
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].var->value(), b[i].var->value());
  EXPECT_EQ(t.state().step, 0);
  TrainConfig wrong = MicroConfig();
  wrong.model_dim = 32;
  EXPECT_THROW(Trainer::FromPretrained(pre.Snapshot(), wrong), Error);
}

TEST(TrainerTest, FinetuneLearnsAndKeepsBest) {
  const Corpora s = MakeCorpora();
  TrainConfig cfg = MicroConfig();
  cfg.finetune_epochs = 12;
  Trainer t(cfg, s.vocab, s.scheme);
  t.Finetune(s.train, &s.train);
  const auto& h = t.finetune_history();
  ASSERT_EQ(h.epoch_losses.size(), 12u);
  EXPECT_LT(h.epoch_losses.back(), h.epoch_losses.front());
  ASSERT_EQ(h.dev_f1.size(), 12u);
  const double best = *std::max_element(h.dev_f1.begin(), h.dev_f1.end());
  const PredictionSet pred = PredictCorpus(t.model(), s.train, s.vocab, cfg.max_length);
  EXPECT_DOUBLE_EQ(MicroF1(pred, GoldFacts(s.train, s.scheme)), best);
}

TEST(EpochOrderTest, PermutationAndStageSeparation) {
  const auto a = EpochOrder(10, 1, "finetune", 0);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < 10; ++i) EXPECT_EQ(sorted[i], i);
  EXPECT_EQ(a, EpochOrder(10, 1, "finetune", 0));
  EXPECT_NE(a, EpochOrder(10, 1, "finetune", 1));
  EXPECT_NE(a, EpochOrder(10, 1, "pretrain", 0));
}

}  // namespace
}  // namespace eracl
