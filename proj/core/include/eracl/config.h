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

#ifndef ERACL_CONFIG_H_
#define ERACL_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace eracl {

// Every training hyperparameter. Keys of the flat key=value form equal the
// field names below; CLI flags are the same keys with '-' for '_'.
struct TrainConfig {
  uint64_t seed = 1;

  // Augmentation.
  bool use_era = true;
  double era_p = 0.1;
  int era_alpha = 2;
  // Relations with train frequency below this are augmented, unless
  // era_relations lists them explicitly.
  int64_t era_threshold = 200;
  std::vector<std::string> era_relations;

  // Contrastive pretraining.
  bool use_cl = true;
  double cl_tau = 0.5;
  int cl_queue_size = 500;
  double cl_momentum = 0.99;
  int cl_proj_dim = 0;  // 0 means model_dim
  double cl_lr = 1e-5;
  int pretrain_epochs = 3;

  // Fine-tuning.
  double lr_backbone = 5e-5;
  double lr_head = 1e-4;
  int finetune_epochs = 30;

  double warmup_ratio = 0.06;
  double max_grad_norm = 1.0;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 4;
  // Unlabelled pairs kept per labelled pair; negative means all of them.
  double negative_ratio = -1.0;
  int workers = 1;

  // Model shape.
  int model_dim = 64;
  int num_heads = 4;
  int num_layers = 4;
  int ffn_dim = 256;
  int max_length = 512;
  double dropout = 0.1;
  int bilinear_groups = 8;

  void Validate() const;

  // Throws Error(kUsage) for unknown keys or unparsable values.
  void Set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> ToKeyValues() const;
  static std::vector<std::string> Keys();

  int proj_dim() const { return cl_proj_dim > 0 ? cl_proj_dim : model_dim; }
};

// "desk": sized for minute-scale CPU runs. "paper-defaults": the published
// hyperparameters with a BERT-base-shaped encoder.
TrainConfig Profile(std::string_view name);
std::vector<std::string> ProfileNames();

// Parses "key = value" lines; '#' starts a comment. Callers treat a
// `profile` key as the choice of base profile.
std::map<std::string, std::string> ParseKeyValues(std::string_view text);
std::string FormatKeyValues(const std::map<std::string, std::string>& kv);

}  // namespace eracl

#endif  // ERACL_CONFIG_H_
