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

#include "eracl/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "eracl/error.h"
#include "eracl/random.h"
#include "eracl/relation_encoding.h"
#include "json.hpp"

namespace eracl {

using ag::Var;
using nlohmann::json;

namespace {

constexpr uint64_t kEncoderSeedTag = 0xE5C0;
constexpr uint64_t kHeadSeedTag = 0x4EAD;
constexpr uint64_t kProjectionSeedTag = 0x9801;
constexpr uint64_t kNegativeSeedTag = 0x4E65;
constexpr uint64_t kEpochSeedTag = 0xE90C;
constexpr uint64_t kStepSeedTag = 0x57E9;

uint64_t StageTag(const std::string& stage) {
  return stage == "pretrain" ? 1 : 2;
}

// Runs fn(i) for i in [0, n). Exceptions are rethrown in index order.
template <typename Fn>
void ParallelFor(size_t n, int workers, const Fn& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto run = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const size_t count = std::min<size_t>(static_cast<size_t>(workers), n);
  for (size_t w = 0; w < count; ++w) threads.emplace_back(run);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void ZeroGrads(const std::vector<NamedParam>& params) {
  for (const auto& p : params) p.var->ZeroGrad();
}

std::vector<Matrix> Values(const std::vector<NamedParam>& params) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.var->value());
  return out;
}

void LoadValues(const std::vector<NamedParam>& params,
                const std::vector<Matrix>& values) {
  Check(params.size() == values.size(), "parameter count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    params[i].var->mutable_value() = values[i];
  }
}

void LoadTensors(const std::vector<NamedParam>& params,
                 const TensorArchive& archive, const std::string& prefix) {
  for (const auto& p : params) {
    const Matrix& m = archive.Get(prefix + p.name);
    if (m.rows() != p.var->rows() || m.cols() != p.var->cols()) {
      throw Error(ErrorKind::kValidation,
                  "checkpoint tensor " + prefix + p.name + " has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", model expects " + std::to_string(p.var->rows()) + "x" +
                      std::to_string(p.var->cols()));
    }
    p.var->mutable_value() = m;
  }
}

void SaveTensors(const std::vector<NamedParam>& params, TensorArchive& archive,
                 const std::string& prefix) {
  for (const auto& p : params) {
    archive.tensors.emplace_back(prefix + p.name, p.var->value());
  }
}

}  // namespace

EncoderConfig MakeEncoderConfig(const TrainConfig& config, int vocab_size) {
  EncoderConfig c;
  c.vocab_size = vocab_size;
  c.model_dim = config.model_dim;
  c.num_heads = config.num_heads;
  c.num_layers = config.num_layers;
  c.ffn_dim = config.ffn_dim;
  c.max_length = config.max_length;
  c.dropout = config.dropout;
  return c;
}

HeadConfig MakeHeadConfig(const TrainConfig& config, int num_relations) {
  HeadConfig c;
  c.model_dim = config.model_dim;
  c.num_relations = num_relations;
  c.groups = config.bilinear_groups;
  return c;
}

Model Model::Init(const TrainConfig& config, int vocab_size,
                  int num_relations) {
  Model m;
  m.encoder = EncoderParams::Init(MakeEncoderConfig(config, vocab_size),
                                  DeriveSeed(config.seed, {kEncoderSeedTag}));
  m.head = HeadParams::Init(MakeHeadConfig(config, num_relations),
                            DeriveSeed(config.seed, {kHeadSeedTag}));
  m.projection =
      ProjectionParams::Init(config.model_dim, config.proj_dim(),
                             DeriveSeed(config.seed, {kProjectionSeedTag}));
  return m;
}

std::vector<NamedParam> Model::Parameters() {
  std::vector<NamedParam> out = encoder.Parameters();
  for (auto& p : head.Parameters()) out.push_back(p);
  for (auto& p : projection.Parameters()) out.push_back(p);
  return out;
}

std::vector<NamedParam> Model::FinetuneParameters() {
  std::vector<NamedParam> out = encoder.Parameters();
  for (auto& p : head.Parameters()) out.push_back(p);
  return out;
}

std::vector<NamedParam> Model::ContrastiveParameters() {
  std::vector<NamedParam> out = encoder.Parameters();
  for (auto& p : head.FusionParameters()) out.push_back(p);
  for (auto& p : projection.Parameters()) out.push_back(p);
  return out;
}

Model Model::Clone(bool trainable) const {
  Model copy = *this;
  for (const auto& p : copy.Parameters()) {
    Matrix value = p.var->value();
    *p.var = trainable ? Var::Parameter(std::move(value))
                       : Var::Constant(std::move(value));
  }
  return copy;
}

std::vector<PreparedDocument> PrepareCorpus(const Corpus& corpus,
                                            const Vocabulary& vocab,
                                            const RelationScheme& scheme,
                                            int max_length,
                                            double negative_ratio,
                                            uint64_t seed) {
  std::vector<PreparedDocument> out;
  out.reserve(corpus.documents.size());
  for (size_t d = 0; d < corpus.documents.size(); ++d) {
    const RawDocument& doc = corpus.documents[d];
    PreparedDocument prepared;
    prepared.marked = InsertMarkers(doc, vocab, max_length);
    for (const LabeledPair& label : doc.labels) {
      TrainingPair pair{label.head, label.tail, {}};
      for (const std::string& r : label.relations) {
        const int index = scheme.IndexOf(r);
        if (index < 0) {
          throw Error(ErrorKind::kValidation,
                      "document '" + doc.title + "': relation '" + r +
                          "' is not in the relation scheme");
        }
        pair.relations.push_back(index);
      }
      std::sort(pair.relations.begin(), pair.relations.end());
      prepared.pairs.push_back(std::move(pair));
    }
    prepared.num_labeled = static_cast<int>(prepared.pairs.size());

    std::vector<std::pair<int, int>> negatives = UnlabeledPairs(doc);
    if (negative_ratio >= 0.0) {
      const size_t keep = std::min(
          negatives.size(),
          static_cast<size_t>(std::ceil(negative_ratio * prepared.num_labeled)));
      std::vector<size_t> idx(negatives.size());
      std::iota(idx.begin(), idx.end(), 0);
      Rng rng(DeriveSeed(seed, {kNegativeSeedTag, d}));
      rng.Shuffle(idx);
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      std::vector<std::pair<int, int>> kept;
      for (size_t i : idx) kept.push_back(negatives[i]);
      negatives = std::move(kept);
    }
    for (const auto& [h, t] : negatives) prepared.pairs.push_back({h, t, {}});
    out.push_back(std::move(prepared));
  }
  return out;
}

std::vector<bool> ResolveAugmentSet(const TrainConfig& config,
                                    const RelationScheme& scheme,
                                    std::span<const int64_t> frequencies) {
  std::vector<bool> augment(scheme.size(), false);
  if (!config.era_relations.empty()) {
    for (const std::string& r : config.era_relations) {
      const int index = scheme.IndexOf(r);
      if (index < 0) {
        throw Error(ErrorKind::kUsage,
                    "era_relations names unknown relation '" + r + "'");
      }
      augment[index] = true;
    }
    return augment;
  }
  Check(frequencies.size() == static_cast<size_t>(scheme.size()),
        "frequency table size mismatch");
  FrequencyMap freqs;
  for (int r = 0; r < scheme.size(); ++r) freqs[scheme.id(r)] = frequencies[r];
  for (const std::string& r : SelectAugmentSet(freqs, config.era_threshold)) {
    augment[scheme.IndexOf(r)] = true;
  }
  return augment;
}

double LrSchedule(int64_t step, int64_t total_steps, double warmup_ratio,
                  double base_lr) {
  if (total_steps <= 0) return 0.0;
  const auto warmup =
      static_cast<int64_t>(warmup_ratio * static_cast<double>(total_steps));
  if (step < warmup) {
    return base_lr * static_cast<double>(step) / static_cast<double>(warmup);
  }
  const double remaining = static_cast<double>(total_steps - step) /
                           static_cast<double>(total_steps - warmup);
  return base_lr * std::max(0.0, remaining);
}

double ClipGradients(std::span<Matrix> grads, double max_norm) {
  Check(max_norm > 0.0, "max_norm must be positive", ErrorKind::kUsage);
  double sq = 0.0;
  for (const Matrix& g : grads) sq += g.squaredNorm();
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (Matrix& g : grads) g *= scale;
  }
  return norm;
}

double ClipGradients(const std::vector<NamedParam>& params, double max_norm) {
  Check(max_norm > 0.0, "max_norm must be positive", ErrorKind::kUsage);
  double sq = 0.0;
  for (const auto& p : params) {
    if (p.var->grad().size() > 0) sq += p.var->grad().squaredNorm();
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (const auto& p : params) {
      if (p.var->grad().size() > 0) p.var->mutable_grad() *= scale;
    }
  }
  return norm;
}

AdamW::Moments& AdamW::Slot(const NamedParam& p) {
  auto it = state_.find(p.name);
  if (it == state_.end()) {
    Moments m{Matrix::Zero(p.var->rows(), p.var->cols()),
              Matrix::Zero(p.var->rows(), p.var->cols())};
    it = state_.emplace(p.name, std::move(m)).first;
  }
  return it->second;
}

void AdamW::Step(const std::vector<NamedParam>& params,
                 const std::function<double(ParamGroup)>& lr) {
  ++steps_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (const auto& p : params) {
    const Matrix& g = p.var->grad();
    if (g.size() == 0) continue;
    Moments& s = Slot(p);
    s.m = b1 * s.m + (1.0 - b1) * g;
    s.v = b2 * s.v + (1.0 - b2) * g.cwiseProduct(g);
    const double rate = lr(p.group);
    Matrix& w = p.var->mutable_value();
    if (p.decay && options_.weight_decay != 0.0) {
      w *= 1.0 - rate * options_.weight_decay;
    }
    w.array() -= rate * (s.m.array() / c1) /
                 ((s.v.array() / c2).sqrt() + options_.eps);
  }
}

void AdamW::Export(const std::string& prefix, TensorArchive& archive) const {
  for (const auto& [name, s] : state_) {
    archive.tensors.emplace_back(prefix + "m/" + name, s.m);
    archive.tensors.emplace_back(prefix + "v/" + name, s.v);
  }
}

void AdamW::Import(const std::string& prefix, const TensorArchive& archive,
                   const std::vector<NamedParam>& params, int64_t steps) {
  state_.clear();
  steps_ = steps;
  for (const auto& p : params) {
    const Matrix* m = archive.Find(prefix + "m/" + p.name);
    const Matrix* v = archive.Find(prefix + "v/" + p.name);
    if (!m || !v) continue;
    state_[p.name] = Moments{*m, *v};
  }
}

namespace {

struct DocLoss {
  Var scores;
  std::vector<std::vector<int>> positives;
  int64_t augmented = 0;
};

}  // namespace

BatchLoss FinetuneLoss(const Model& model,
                       std::span<const PreparedDocument* const> docs,
                       const EraConfig* era, Mode mode, uint64_t stream_seed,
                       int workers) {
  std::vector<DocLoss> per_doc(docs.size());
  ParallelFor(docs.size(), workers, [&](size_t i) {
    const PreparedDocument& doc = *docs[i];
    if (doc.pairs.empty()) return;
    Rng rng(DeriveSeed(stream_seed, {i}));
    const EncodingOutput enc = Encode(doc.marked, model.encoder, mode, &rng);
    const DocumentFeatures features = ComputeDocumentFeatures(enc, doc.marked);
    std::vector<TripleRepresentation> triples =
        BuildTriples(features, doc.pairs);
    if (era) {
      AugmentResult aug = Augment(triples, features.hidden, *era, rng);
      per_doc[i].augmented = static_cast<int64_t>(aug.augmented.size());
      triples = std::move(aug.all);
    }
    const StackedTriples stacked = Stack(triples);
    const auto [h, t] =
        Fuse(stacked.heads, stacked.contexts, stacked.tails, model.head);
    per_doc[i].scores = Score(h, t, model.head);
    for (const auto& tr : triples) per_doc[i].positives.push_back(tr.relations);
  });

  BatchLoss out;
  std::vector<Var> scores;
  std::vector<std::vector<int>> positives;
  for (auto& d : per_doc) {
    if (!d.scores.defined()) continue;
    scores.push_back(d.scores);
    out.augmented += d.augmented;
    for (auto& p : d.positives) positives.push_back(std::move(p));
  }
  out.triples = static_cast<int64_t>(positives.size());
  if (scores.empty()) return out;
  out.loss = AtlLoss(ag::ConcatRows(scores), positives);
  return out;
}

namespace {

struct DocContrast {
  Var anchors;
  std::vector<std::vector<int>> anchor_relations;
  Matrix keys;
  std::vector<std::vector<int>> key_relations;
  int64_t augmented = 0;
};

}  // namespace

BatchLoss ContrastiveLoss(const Model& online, const Model& shadow,
                          std::span<const PreparedDocument* const> docs,
                          const EraConfig* era, double tau,
                          RelationQueueBank& bank, uint64_t stream_seed,
                          int workers) {
  Check(tau > 0.0, "InfoNCE temperature must be positive", ErrorKind::kUsage);
  std::vector<DocContrast> per_doc(docs.size());
  ParallelFor(docs.size(), workers, [&](size_t i) {
    const PreparedDocument& doc = *docs[i];
    if (doc.num_labeled == 0) return;
    const std::span<const TrainingPair> labeled(doc.pairs.data(),
                                                doc.num_labeled);
    Rng rng(DeriveSeed(stream_seed, {i}));
    DocContrast& out = per_doc[i];

    const EncodingOutput enc =
        Encode(doc.marked, online.encoder, Mode::kTrain, &rng);
    const DocumentFeatures features = ComputeDocumentFeatures(enc, doc.marked);
    std::vector<TripleRepresentation> triples = BuildTriples(features, labeled);
    if (era) {
      AugmentResult aug = Augment(triples, features.hidden, *era, rng);
      out.augmented = static_cast<int64_t>(aug.augmented.size());
      triples = std::move(aug.all);
    }
    const StackedTriples stacked = Stack(triples);
    const auto [h, t] =
        Fuse(stacked.heads, stacked.contexts, stacked.tails, online.head);
    out.anchors = Project(h, t, online.projection);
    for (const auto& tr : triples) out.anchor_relations.push_back(tr.relations);

    const EncodingOutput key_enc =
        Encode(doc.marked, shadow.encoder, Mode::kEval);
    const DocumentFeatures key_features =
        ComputeDocumentFeatures(key_enc, doc.marked);
    const std::vector<TripleRepresentation> key_triples =
        BuildTriples(key_features, labeled);
    const StackedTriples key_stacked = Stack(key_triples);
    const auto [kh, kt] = Fuse(key_stacked.heads, key_stacked.contexts,
                               key_stacked.tails, shadow.head);
    out.keys = Project(kh, kt, shadow.projection).value();
    for (const auto& tr : key_triples) out.key_relations.push_back(tr.relations);
  });

  for (const auto& d : per_doc) {
    for (Eigen::Index k = 0; k < d.keys.rows(); ++k) {
      bank.Enqueue(d.keys.row(k), d.key_relations[k]);
    }
  }

  BatchLoss out;
  std::vector<Var> terms;
  const int num_relations = bank.num_relations();
  for (const auto& d : per_doc) {
    out.augmented += d.augmented;
    for (size_t j = 0; j < d.anchor_relations.size(); ++j) {
      const std::vector<int>& rels = d.anchor_relations[j];
      const Matrix positives = bank.Gather(rels);
      if (positives.rows() == 0) continue;
      std::vector<int> others;
      for (int r = 0; r < num_relations; ++r) {
        if (!std::binary_search(rels.begin(), rels.end(), r)) others.push_back(r);
      }
      terms.push_back(InfoNce(ag::Row(d.anchors, static_cast<Eigen::Index>(j)),
                                  positives, bank.Gather(others), tau));
    }
  }
  out.triples = static_cast<int64_t>(terms.size());
  if (!terms.empty()) out.loss = ag::MeanOf(terms);
  return out;
}

PredictionSet PredictDocuments(const Model& model,
                               std::span<const MarkedDocument> docs,
                               int workers) {
  std::vector<std::vector<Fact>> per_doc(docs.size());
  ParallelFor(docs.size(), workers, [&](size_t d) {
    const MarkedDocument& doc = docs[d];
    const int n = static_cast<int>(doc.entity_markers.size());
    std::vector<TrainingPair> pairs;
    for (int h = 0; h < n; ++h) {
      for (int t = 0; t < n; ++t) {
        if (h != t) pairs.push_back({h, t, {}});
      }
    }
    if (pairs.empty()) return;
    const EncodingOutput enc = Encode(doc, model.encoder, Mode::kEval);
    const DocumentFeatures features = ComputeDocumentFeatures(enc, doc);
    const std::vector<TripleRepresentation> triples =
        BuildTriples(features, pairs);
    const StackedTriples stacked = Stack(triples);
    const auto [hv, tv] =
        Fuse(stacked.heads, stacked.contexts, stacked.tails, model.head);
    const Matrix scores = Score(hv, tv, model.head).value();
    for (size_t i = 0; i < pairs.size(); ++i) {
      const RowVector row = scores.row(static_cast<Eigen::Index>(i));
      for (int r : Predict(row)) {
        per_doc[d].push_back(
            {static_cast<int>(d), pairs[i].head, r, pairs[i].tail});
      }
    }
  });
  PredictionSet out;
  for (const auto& facts : per_doc) out.insert(facts.begin(), facts.end());
  return out;
}

PredictionSet PredictCorpus(const Model& model, const Corpus& corpus,
                            const Vocabulary& vocab, int max_length,
                            int workers) {
  std::vector<MarkedDocument> marked;
  marked.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    marked.push_back(InsertMarkers(doc, vocab, max_length));
  }
  return PredictDocuments(model, marked, workers);
}

MetricReport Evaluate(const Model& model, const Corpus& eval,
                      const Corpus& train, const Vocabulary& vocab,
                      const RelationScheme& scheme, int max_length,
                      UndefinedF1Policy policy, int workers) {
  const PredictionSet pred =
      PredictCorpus(model, eval, vocab, max_length, workers);
  const PredictionSet gold = GoldFacts(eval, scheme);
  const TrainFacts facts(train);
  const std::vector<int64_t> freqs = SchemeFrequencies(train, scheme);
  return BuildReport(
      pred, gold,
      [&](const Fact& f) { return facts.Contains(f, eval, scheme); }, freqs,
      scheme.size(), policy);
}

std::string MetricsJsonLine(const MetricsRecord& record) {
  json j;
  j["step"] = record.step;
  j["stage"] = record.stage;
  j["epoch"] = record.epoch;
  j["loss"] = record.loss;
  j["lr"] = record.lr;
  return j.dump();
}

std::vector<size_t> EpochOrder(size_t n, uint64_t seed,
                               const std::string& stage, int epoch) {
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, {kEpochSeedTag, StageTag(stage),
                            static_cast<uint64_t>(epoch)}));
  rng.Shuffle(order);
  return order;
}

Trainer::Trainer(TrainConfig config, Vocabulary vocab, RelationScheme scheme)
    : config_(std::move(config)),
      vocab_(std::move(vocab)),
      scheme_(std::move(scheme)) {
  config_.Validate();
  Check(scheme_.size() > 0, "relation scheme is empty", ErrorKind::kValidation);
  model_ = Model::Init(config_, vocab_.size(), scheme_.size());
  optimizer_ = AdamW({config_.adam_beta1, config_.adam_beta2, config_.adam_eps,
                      config_.weight_decay});
}

void Trainer::BeginStage(const std::string& stage) {
  state_ = StageState{};
  state_.stage = stage;
  optimizer_ = AdamW({config_.adam_beta1, config_.adam_beta2, config_.adam_eps,
                      config_.weight_decay});
  best_dev_f1_.reset();
  best_params_.clear();
  if (stage == "pretrain") {
    pretrain_history_ = {};
    shadow_ = model_.Clone(false);
    queues_ = RelationQueueBank(scheme_.size(), config_.cl_queue_size,
                                config_.proj_dim());
  } else {
    finetune_history_ = {};
    shadow_.reset();
    queues_ = RelationQueueBank();
  }
}

namespace {

struct StepOutcome {
  std::optional<double> loss;
  double lr = 0.0;
  int64_t triples = 0;
};

}  // namespace

template <typename StepFn, typename EpochEndFn>
bool Trainer::RunStage(const std::string& stage, int epochs, size_t num_docs,
                       int64_t stop_at_step, StageHistory& history,
                       const StepFn& step_fn, const EpochEndFn& epoch_end) {
  const auto batch = static_cast<size_t>(config_.batch_size);
  const auto num_batches = static_cast<int64_t>((num_docs + batch - 1) / batch);
  const int64_t total = num_batches * epochs;
  while (state_.epoch < epochs) {
    const std::vector<size_t> order =
        EpochOrder(num_docs, config_.seed, stage, state_.epoch);
    while (state_.batch < num_batches) {
      if (stop_at_step >= 0 && state_.step >= stop_at_step) return false;
      const size_t begin = static_cast<size_t>(state_.batch) * batch;
      const size_t end = std::min(num_docs, begin + batch);
      const std::vector<size_t> indices(order.begin() + begin,
                                        order.begin() + end);
      const uint64_t stream = DeriveSeed(
          config_.seed,
          {kStepSeedTag, StageTag(stage), static_cast<uint64_t>(state_.step)});
      const StepOutcome outcome = step_fn(indices, state_.step, total, stream);
      if (outcome.loss) {
        state_.epoch_loss_sum += *outcome.loss;
        ++state_.epoch_loss_count;
        if (sink_) {
          sink_({state_.step, stage, state_.epoch, *outcome.loss, outcome.lr});
        }
      }
      state_.epoch_triple_sum += outcome.triples;
      ++state_.step;
      ++state_.batch;
    }
    history.epoch_losses.push_back(
        state_.epoch_loss_count > 0
            ? state_.epoch_loss_sum / static_cast<double>(state_.epoch_loss_count)
            : 0.0);
    history.epoch_triples.push_back(state_.epoch_triple_sum);
    epoch_end(state_.epoch);
    ++state_.epoch;
    state_.batch = 0;
    state_.epoch_loss_sum = 0.0;
    state_.epoch_loss_count = 0;
    state_.epoch_triple_sum = 0;
  }
  state_.finished = true;
  return true;
}

bool Trainer::Pretrain(const Corpus& distant, int64_t stop_at_step) {
  Check(config_.use_cl, "pretraining requires use_cl", ErrorKind::kUsage);
  const std::vector<PreparedDocument> docs =
      PrepareCorpus(distant, vocab_, scheme_, config_.max_length, 0.0,
                    config_.seed);
  int64_t labeled = 0;
  for (const auto& d : docs) labeled += d.num_labeled;
  Check(labeled > 0, "pretraining corpus has no labelled pairs",
        ErrorKind::kValidation);
  if (state_.stage != "pretrain" || state_.finished) BeginStage("pretrain");

  EraConfig era{config_.era_p, config_.era_alpha,
                ResolveAugmentSet(config_, scheme_,
                                  SchemeFrequencies(distant, scheme_))};
  const std::vector<NamedParam> online = model_.ContrastiveParameters();
  const std::vector<NamedParam> shadow = shadow_->ContrastiveParameters();

  auto step = [&](const std::vector<size_t>& indices, int64_t step,
                  int64_t total, uint64_t stream) {
    std::vector<const PreparedDocument*> batch;
    for (size_t i : indices) batch.push_back(&docs[i]);
    StepOutcome outcome;
    outcome.lr = LrSchedule(step, total, config_.warmup_ratio, config_.cl_lr);
    BatchLoss loss = ContrastiveLoss(model_, *shadow_, batch,
                                     config_.use_era ? &era : nullptr,
                                     config_.cl_tau, queues_, stream,
                                     config_.workers);
    outcome.triples = loss.triples;
    if (!loss.loss.defined()) return outcome;
    outcome.loss = loss.loss.scalar();
    ag::Backward(loss.loss);
    ClipGradients(online, config_.max_grad_norm);
    optimizer_.Step(online, [&](ParamGroup) { return outcome.lr; });
    ZeroGrads(online);
    MomentumUpdate(online, shadow, config_.cl_momentum);
    return outcome;
  };
  return RunStage("pretrain", config_.pretrain_epochs, docs.size(),
                  stop_at_step, pretrain_history_, step, [](int) {});
}

bool Trainer::Finetune(const Corpus& train, const Corpus* dev,
                       int64_t stop_at_step) {
  const std::vector<PreparedDocument> docs =
      PrepareCorpus(train, vocab_, scheme_, config_.max_length,
                    config_.negative_ratio, config_.seed);
  if (state_.stage != "finetune" || state_.finished) BeginStage("finetune");

  EraConfig era{config_.era_p, config_.era_alpha,
                ResolveAugmentSet(config_, scheme_,
                                  SchemeFrequencies(train, scheme_))};
  const std::vector<NamedParam> params = model_.FinetuneParameters();
  std::vector<MarkedDocument> dev_docs;
  PredictionSet dev_gold;
  if (dev) {
    for (const auto& doc : dev->documents) {
      dev_docs.push_back(InsertMarkers(doc, vocab_, config_.max_length));
    }
    dev_gold = GoldFacts(*dev, scheme_);
  }

  auto step = [&](const std::vector<size_t>& indices, int64_t step,
                  int64_t total, uint64_t stream) {
    std::vector<const PreparedDocument*> batch;
    for (size_t i : indices) batch.push_back(&docs[i]);
    StepOutcome outcome;
    const double lr_backbone =
        LrSchedule(step, total, config_.warmup_ratio, config_.lr_backbone);
    const double lr_head =
        LrSchedule(step, total, config_.warmup_ratio, config_.lr_head);
    outcome.lr = lr_head;
    BatchLoss loss =
        FinetuneLoss(model_, batch, config_.use_era ? &era : nullptr,
                     Mode::kTrain, stream, config_.workers);
    outcome.triples = loss.triples;
    if (!loss.loss.defined()) return outcome;
    outcome.loss = loss.loss.scalar();
    ag::Backward(loss.loss);
    ClipGradients(params, config_.max_grad_norm);
    optimizer_.Step(params, [&](ParamGroup g) {
      return g == ParamGroup::kBackbone ? lr_backbone : lr_head;
    });
    ZeroGrads(params);
    return outcome;
  };
  auto epoch_end = [&](int) {
    if (!dev) return;
    const double f1 =
        MicroF1(PredictDocuments(model_, dev_docs, config_.workers), dev_gold);
    finetune_history_.dev_f1.push_back(f1);
    if (!best_dev_f1_ || f1 > *best_dev_f1_) {
      best_dev_f1_ = f1;
      best_params_ = Values(params);
    }
  };
  const bool done = RunStage("finetune", config_.finetune_epochs, docs.size(),
                             stop_at_step, finetune_history_, step, epoch_end);
  if (done && !best_params_.empty()) LoadValues(params, best_params_);
  return done;
}

namespace {

json StateJson(const StageState& s) {
  return {{"stage", s.stage},
          {"epoch", s.epoch},
          {"batch", s.batch},
          {"step", s.step},
          {"epoch_loss_sum", s.epoch_loss_sum},
          {"epoch_loss_count", s.epoch_loss_count},
          {"epoch_triple_sum", s.epoch_triple_sum},
          {"finished", s.finished}};
}

StageState StateFromJson(const json& j) {
  StageState s;
  s.stage = j.at("stage").get<std::string>();
  s.epoch = j.at("epoch").get<int>();
  s.batch = j.at("batch").get<int64_t>();
  s.step = j.at("step").get<int64_t>();
  s.epoch_loss_sum = j.at("epoch_loss_sum").get<double>();
  s.epoch_loss_count = j.at("epoch_loss_count").get<int64_t>();
  s.epoch_triple_sum = j.at("epoch_triple_sum").get<int64_t>();
  s.finished = j.at("finished").get<bool>();
  return s;
}

json HistoryJson(const StageHistory& h) {
  return {{"epoch_losses", h.epoch_losses},
          {"epoch_triples", h.epoch_triples},
          {"dev_f1", h.dev_f1}};
}

StageHistory HistoryFromJson(const json& j) {
  StageHistory h;
  h.epoch_losses = j.at("epoch_losses").get<std::vector<double>>();
  h.epoch_triples = j.at("epoch_triples").get<std::vector<int64_t>>();
  h.dev_f1 = j.at("dev_f1").get<std::vector<double>>();
  return h;
}

struct ArchiveHeader {
  TrainConfig config;
  Vocabulary vocab;
  RelationScheme scheme;
  json meta;
};

ArchiveHeader ReadHeader(const TensorArchive& archive) {
  ArchiveHeader out;
  try {
    out.meta = json::parse(archive.meta_json);
    if (out.meta.value("format", "") != "eracl-model") {
      throw Error(ErrorKind::kValidation, "checkpoint is not an eracl model");
    }
    for (const auto& [k, v] : out.meta.at("config").items()) {
      out.config.Set(k, v.get<std::string>());
    }
    out.vocab = Vocabulary(out.meta.at("vocab").get<std::vector<std::string>>());
    out.scheme = RelationScheme(
        out.meta.at("scheme").at("ids").get<std::vector<std::string>>(),
        out.meta.at("scheme").at("names").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation,
                std::string("checkpoint manifest: ") + e.what());
  }
  return out;
}

}  // namespace

TensorArchive Trainer::Snapshot() const {
  Model& model = const_cast<Model&>(model_);
  TensorArchive archive;
  SaveTensors(model.Parameters(), archive, "model/");
  optimizer_.Export("adam/", archive);
  if (shadow_) {
    SaveTensors(const_cast<Model&>(*shadow_).Parameters(), archive, "shadow/");
  }
  json queues = nullptr;
  if (queues_.num_relations() > 0) {
    const std::vector<Matrix> q = queues_.Export();
    for (size_t r = 0; r < q.size(); ++r) {
      archive.tensors.emplace_back("queue/" + std::to_string(r), q[r]);
    }
    queues = {{"num_relations", queues_.num_relations()},
              {"capacity", queues_.capacity()},
              {"dim", queues_.dim()}};
  }
  const std::vector<NamedParam> ft = model.FinetuneParameters();
  for (size_t i = 0; i < best_params_.size(); ++i) {
    archive.tensors.emplace_back("best/" + ft[i].name, best_params_[i]);
  }

  json meta;
  meta["format"] = "eracl-model";
  json config = json::object();
  for (const auto& [k, v] : config_.ToKeyValues()) config[k] = v;
  meta["config"] = std::move(config);
  meta["vocab"] = vocab_.tokens();
  meta["scheme"] = {{"ids", scheme_.ids()}, {"names", json::array()}};
  for (int r = 0; r < scheme_.size(); ++r) {
    meta["scheme"]["names"].push_back(scheme_.name(r));
  }
  meta["state"] = StateJson(state_);
  meta["pretrain_history"] = HistoryJson(pretrain_history_);
  meta["finetune_history"] = HistoryJson(finetune_history_);
  meta["adam_steps"] = optimizer_.steps();
  meta["has_shadow"] = shadow_.has_value();
  meta["queues"] = std::move(queues);
  meta["best_dev_f1"] = best_dev_f1_ ? json(*best_dev_f1_) : json(nullptr);
  meta["has_best"] = !best_params_.empty();
  meta["rng"] = {{"seed", config_.seed},
                 {"streams", "splitmix64(seed, stage, step, document)"}};
  archive.meta_json = meta.dump();
  return archive;
}

Trainer Trainer::Restore(const TensorArchive& archive) {
  ArchiveHeader header = ReadHeader(archive);
  Trainer t(header.config, header.vocab, header.scheme);
  LoadTensors(t.model_.Parameters(), archive, "model/");
  try {
    const json& meta = header.meta;
    t.state_ = StateFromJson(meta.at("state"));
    t.pretrain_history_ = HistoryFromJson(meta.at("pretrain_history"));
    t.finetune_history_ = HistoryFromJson(meta.at("finetune_history"));
    t.optimizer_.Import("adam/", archive, t.model_.Parameters(),
                        meta.at("adam_steps").get<int64_t>());
    if (meta.at("has_shadow").get<bool>()) {
      t.shadow_ = t.model_.Clone(false);
      LoadTensors(t.shadow_->Parameters(), archive, "shadow/");
    }
    if (!meta.at("queues").is_null()) {
      const json& q = meta.at("queues");
      t.queues_ = RelationQueueBank(q.at("num_relations").get<int>(),
                                    q.at("capacity").get<int>(),
                                    q.at("dim").get<int>());
      std::vector<Matrix> stored;
      for (int r = 0; r < t.queues_.num_relations(); ++r) {
        stored.push_back(archive.Get("queue/" + std::to_string(r)));
      }
      t.queues_.Import(stored);
    }
    if (!meta.at("best_dev_f1").is_null()) {
      t.best_dev_f1_ = meta.at("best_dev_f1").get<double>();
    }
    if (meta.at("has_best").get<bool>()) {
      for (const auto& p : t.model_.FinetuneParameters()) {
        t.best_params_.push_back(archive.Get("best/" + p.name));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kValidation,
                std::string("checkpoint manifest: ") + e.what());
  }
  return t;
}

Trainer Trainer::FromPretrained(const TensorArchive& archive,
                                TrainConfig config) {
  ArchiveHeader header = ReadHeader(archive);
  const TrainConfig& saved = header.config;
  if (saved.model_dim != config.model_dim ||
      saved.num_heads != config.num_heads ||
      saved.num_layers != config.num_layers ||
      saved.ffn_dim != config.ffn_dim ||
      saved.max_length != config.max_length ||
      saved.bilinear_groups != config.bilinear_groups ||
      saved.proj_dim() != config.proj_dim()) {
    throw Error(ErrorKind::kValidation,
                "checkpoint model shape does not match the requested config");
  }
  Trainer t(std::move(config), header.vocab, header.scheme);
  LoadTensors(t.model_.Parameters(), archive, "model/");
  return t;
}

}  // namespace eracl
