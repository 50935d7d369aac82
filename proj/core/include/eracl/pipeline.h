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

// Two-stage training: contrastive pretraining, then fine-tuning with the
// adaptive-threshold loss. A Trainer owns every piece of mutable state, so a
// Snapshot taken between steps resumes bit-identically.

#ifndef ERACL_PIPELINE_H_
#define ERACL_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eracl/checkpoint.h"
#include "eracl/config.h"
#include "eracl/corpus.h"
#include "eracl/encoder.h"
#include "eracl/era.h"
#include "eracl/metrics.h"
#include "eracl/moco.h"
#include "eracl/relation_head.h"

namespace eracl {

struct Model {
  EncoderParams encoder;
  HeadParams head;
  ProjectionParams projection;

  static Model Init(const TrainConfig& config, int vocab_size,
                    int num_relations);

  // Stable order, used for checkpoints and the optimizer.
  std::vector<NamedParam> Parameters();
  // Encoder and full relation head. Never includes the projection.
  std::vector<NamedParam> FinetuneParameters();
  // Encoder, head fusion and projection: the set M' shadows.
  std::vector<NamedParam> ContrastiveParameters();

  // Deep copy. Constant copies carry no gradient.
  Model Clone(bool trainable) const;
};

EncoderConfig MakeEncoderConfig(const TrainConfig& config, int vocab_size);
HeadConfig MakeHeadConfig(const TrainConfig& config, int num_relations);

struct PreparedDocument {
  MarkedDocument marked;
  // Labelled pairs first, then the kept negatives.
  std::vector<TrainingPair> pairs;
  int num_labeled = 0;
};

// Relation ids missing from the scheme raise kValidation.
// negative_ratio < 0 keeps every unlabelled ordered pair.
std::vector<PreparedDocument> PrepareCorpus(const Corpus& corpus,
                                            const Vocabulary& vocab,
                                            const RelationScheme& scheme,
                                            int max_length,
                                            double negative_ratio,
                                            uint64_t seed);

// Augment flags per scheme relation: the explicit list when given,
// otherwise relations whose frequency is below the threshold.
std::vector<bool> ResolveAugmentSet(const TrainConfig& config,
                                    const RelationScheme& scheme,
                                    std::span<const int64_t> frequencies);

double LrSchedule(int64_t step, int64_t total_steps, double warmup_ratio,
                  double base_lr);

// Scales every gradient in place when the joint l2 norm exceeds max_norm.
// Returns the norm before clipping.
double ClipGradients(std::span<Matrix> grads, double max_norm);
double ClipGradients(const std::vector<NamedParam>& params, double max_norm);

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

class AdamW {
 public:
  AdamW() = default;
  explicit AdamW(AdamWOptions options) : options_(options) {}

  // Parameters without a gradient are skipped.
  void Step(const std::vector<NamedParam>& params,
            const std::function<double(ParamGroup)>& lr);

  int64_t steps() const { return steps_; }
  void Export(const std::string& prefix, TensorArchive& archive) const;
  void Import(const std::string& prefix, const TensorArchive& archive,
              const std::vector<NamedParam>& params, int64_t steps);

 private:
  struct Moments {
    Matrix m, v;
  };
  AdamWOptions options_;
  int64_t steps_ = 0;
  std::map<std::string, Moments> state_;

  Moments& Slot(const NamedParam& p);
};

struct BatchLoss {
  ag::Var loss;  // undefined when the batch yields no triples
  int64_t triples = 0;
  int64_t augmented = 0;
};

// Mean adaptive-threshold loss over every triple of the batch. `era` of
// nullptr disables augmentation. Document i of the batch draws dropout and
// masks from DeriveSeed(stream_seed, {i}).
BatchLoss FinetuneLoss(const Model& model,
                       std::span<const PreparedDocument* const> docs,
                       const EraConfig* era, Mode mode, uint64_t stream_seed,
                       int workers = 1);

// Encodes anchors with the online model and keys with the shadow, enqueues
// the keys, then returns the mean InfoNCE over anchors with a non-empty
// positive set.
BatchLoss ContrastiveLoss(const Model& online, const Model& shadow,
                          std::span<const PreparedDocument* const> docs,
                          const EraConfig* era, double tau,
                          RelationQueueBank& bank, uint64_t stream_seed,
                          int workers = 1);

PredictionSet PredictDocuments(const Model& model,
                               std::span<const MarkedDocument> docs,
                               int workers = 1);
PredictionSet PredictCorpus(const Model& model, const Corpus& corpus,
                            const Vocabulary& vocab, int max_length,
                            int workers = 1);

MetricReport Evaluate(const Model& model, const Corpus& eval,
                      const Corpus& train, const Vocabulary& vocab,
                      const RelationScheme& scheme, int max_length,
                      UndefinedF1Policy policy = UndefinedF1Policy::kExclude,
                      int workers = 1);

struct MetricsRecord {
  int64_t step = 0;
  std::string stage;
  int epoch = 0;
  double loss = 0.0;
  double lr = 0.0;
};
using MetricsSink = std::function<void(const MetricsRecord&)>;
std::string MetricsJsonLine(const MetricsRecord& record);

struct StageState {
  std::string stage;  // "", "pretrain" or "finetune"
  int epoch = 0;
  int64_t batch = 0;  // next batch within the epoch
  int64_t step = 0;   // optimizer steps taken in this stage
  double epoch_loss_sum = 0.0;
  int64_t epoch_loss_count = 0;
  int64_t epoch_triple_sum = 0;
  bool finished = false;
};

struct StageHistory {
  std::vector<double> epoch_losses;
  std::vector<int64_t> epoch_triples;
  std::vector<double> dev_f1;
};

class Trainer {
 public:
  Trainer(TrainConfig config, Vocabulary vocab, RelationScheme scheme);

  // Full resumable state.
  TensorArchive Snapshot() const;
  static Trainer Restore(const TensorArchive& archive);
  // Model weights only, under a new config with the same model shape.
  static Trainer FromPretrained(const TensorArchive& archive,
                                TrainConfig config);

  void set_metrics_sink(MetricsSink sink) { sink_ = std::move(sink); }

  // Both return false when stopped because the stage reached
  // stop_at_step optimizer steps, true when the stage completed.
  bool Pretrain(const Corpus& distant, int64_t stop_at_step = -1);
  bool Finetune(const Corpus& train, const Corpus* dev,
                int64_t stop_at_step = -1);

  Model& model() { return model_; }
  const Model& model() const { return model_; }
  const TrainConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const RelationScheme& scheme() const { return scheme_; }
  const StageState& state() const { return state_; }
  const StageHistory& pretrain_history() const { return pretrain_history_; }
  const StageHistory& finetune_history() const { return finetune_history_; }
  const RelationQueueBank& queues() const { return queues_; }
  const Model* shadow() const { return shadow_ ? &*shadow_ : nullptr; }

 private:
  void BeginStage(const std::string& stage);
  template <typename StepFn, typename EpochEndFn>
  bool RunStage(const std::string& stage, int epochs, size_t num_docs,
                int64_t stop_at_step, StageHistory& history,
                const StepFn& step_fn, const EpochEndFn& epoch_end);

  TrainConfig config_;
  Vocabulary vocab_;
  RelationScheme scheme_;
  Model model_;
  std::optional<Model> shadow_;
  RelationQueueBank queues_;
  AdamW optimizer_;
  StageState state_;
  StageHistory pretrain_history_;
  StageHistory finetune_history_;
  std::optional<double> best_dev_f1_;
  std::vector<Matrix> best_params_;
  MetricsSink sink_;
};

// Document order for one epoch of a stage; a pure function of its inputs.
std::vector<size_t> EpochOrder(size_t n, uint64_t seed,
                               const std::string& stage, int epoch);

}  // namespace eracl

#endif  // ERACL_PIPELINE_H_
