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

#include "eracl/config.h"

#include <charconv>
#include <functional>
#include <sstream>
#include <variant>

#include "eracl/error.h"

namespace eracl {

namespace {

using FieldRef =
    std::variant<bool TrainConfig::*, int TrainConfig::*, int64_t TrainConfig::*,
                 uint64_t TrainConfig::*, double TrainConfig::*,
                 std::vector<std::string> TrainConfig::*>;

const std::vector<std::pair<std::string, FieldRef>>& Fields() {
  static const std::vector<std::pair<std::string, FieldRef>> fields = {
      {"seed", &TrainConfig::seed},
      {"use_era", &TrainConfig::use_era},
      {"era_p", &TrainConfig::era_p},
      {"era_alpha", &TrainConfig::era_alpha},
      {"era_threshold", &TrainConfig::era_threshold},
      {"era_relations", &TrainConfig::era_relations},
      {"use_cl", &TrainConfig::use_cl},
      {"cl_tau", &TrainConfig::cl_tau},
      {"cl_queue_size", &TrainConfig::cl_queue_size},
      {"cl_momentum", &TrainConfig::cl_momentum},
      {"cl_proj_dim", &TrainConfig::cl_proj_dim},
      {"cl_lr", &TrainConfig::cl_lr},
      {"pretrain_epochs", &TrainConfig::pretrain_epochs},
      {"lr_backbone", &TrainConfig::lr_backbone},
      {"lr_head", &TrainConfig::lr_head},
      {"finetune_epochs", &TrainConfig::finetune_epochs},
      {"warmup_ratio", &TrainConfig::warmup_ratio},
      {"max_grad_norm", &TrainConfig::max_grad_norm},
      {"weight_decay", &TrainConfig::weight_decay},
      {"adam_beta1", &TrainConfig::adam_beta1},
      {"adam_beta2", &TrainConfig::adam_beta2},
      {"adam_eps", &TrainConfig::adam_eps},
      {"batch_size", &TrainConfig::batch_size},
      {"negative_ratio", &TrainConfig::negative_ratio},
      {"workers", &TrainConfig::workers},
      {"model_dim", &TrainConfig::model_dim},
      {"num_heads", &TrainConfig::num_heads},
      {"num_layers", &TrainConfig::num_layers},
      {"ffn_dim", &TrainConfig::ffn_dim},
      {"max_length", &TrainConfig::max_length},
      {"dropout", &TrainConfig::dropout},
      {"bilinear_groups", &TrainConfig::bilinear_groups},
  };
  return fields;
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value) {
  throw Error(ErrorKind::kUsage,
              "invalid value '" + value + "' for config key '" + key + "'");
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) BadValue(key, value);
  return out;
}

std::string FormatDouble(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

void TrainConfig::Set(const std::string& key, const std::string& value) {
  for (const auto& [name, ref] : Fields()) {
    if (name != key) continue;
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(this->*member)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") {
              this->*member = true;
            } else if (value == "false" || value == "0") {
              this->*member = false;
            } else {
              BadValue(key, value);
            }
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            std::vector<std::string> items;
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) {
              item = Trim(item);
              if (!item.empty()) items.push_back(item);
            }
            this->*member = std::move(items);
          } else {
            this->*member = ParseNumber<T>(key, value);
          }
        },
        ref);
    return;
  }
  throw Error(ErrorKind::kUsage, "unknown config key '" + key + "'");
}

std::map<std::string, std::string> TrainConfig::ToKeyValues() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, ref] : Fields()) {
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(this->*member)>;
          const T& v = this->*member;
          if constexpr (std::is_same_v<T, bool>) {
            out[name] = v ? "true" : "false";
          } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
            std::string joined;
            for (size_t i = 0; i < v.size(); ++i) {
              joined += (i ? "," : "") + v[i];
            }
            out[name] = joined;
          } else if constexpr (std::is_same_v<T, double>) {
            out[name] = FormatDouble(v);
          } else {
            out[name] = std::to_string(v);
          }
        },
        ref);
  }
  return out;
}

std::vector<std::string> TrainConfig::Keys() {
  std::vector<std::string> out;
  for (const auto& [name, ref] : Fields()) out.push_back(name);
  return out;
}

void TrainConfig::Validate() const {
  Check(era_p >= 0.0 && era_p <= 1.0, "era_p must be in [0, 1]",
        ErrorKind::kUsage);
  Check(era_alpha >= 0, "era_alpha must be >= 0", ErrorKind::kUsage);
  Check(era_threshold >= 0, "era_threshold must be >= 0", ErrorKind::kUsage);
  Check(cl_tau > 0.0, "cl_tau must be positive", ErrorKind::kUsage);
  Check(cl_queue_size > 0, "cl_queue_size must be positive", ErrorKind::kUsage);
  Check(cl_momentum >= 0.0 && cl_momentum <= 1.0,
        "cl_momentum must be in [0, 1]", ErrorKind::kUsage);
  Check(cl_proj_dim >= 0, "cl_proj_dim must be >= 0", ErrorKind::kUsage);
  Check(warmup_ratio >= 0.0 && warmup_ratio < 1.0,
        "warmup_ratio must be in [0, 1)", ErrorKind::kUsage);
  Check(max_grad_norm > 0.0, "max_grad_norm must be positive",
        ErrorKind::kUsage);
  Check(batch_size > 0, "batch_size must be positive", ErrorKind::kUsage);
  Check(workers > 0, "workers must be positive", ErrorKind::kUsage);
  Check(pretrain_epochs >= 0 && finetune_epochs >= 0,
        "epoch counts must be >= 0", ErrorKind::kUsage);
  Check(cl_lr >= 0.0 && lr_backbone >= 0.0 && lr_head >= 0.0,
        "learning rates must be >= 0", ErrorKind::kUsage);
  Check(model_dim > 0 && num_heads > 0 && model_dim % num_heads == 0,
        "model_dim must be divisible by num_heads", ErrorKind::kUsage);
  Check(bilinear_groups > 0 && model_dim % bilinear_groups == 0,
        "model_dim must be divisible by bilinear_groups", ErrorKind::kUsage);
  Check(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)",
        ErrorKind::kUsage);
}

TrainConfig Profile(std::string_view name) {
  TrainConfig c;
  if (name == "paper-defaults") {
    c.model_dim = 768;
    c.num_heads = 12;
    c.num_layers = 12;
    c.ffn_dim = 3072;
    c.bilinear_groups = 64;
    return c;
  }
  if (name == "desk") {
    c.lr_backbone = 5e-4;
    c.lr_head = 1e-3;
    c.cl_lr = 5e-4;
    c.cl_queue_size = 64;
    c.pretrain_epochs = 3;
    c.finetune_epochs = 30;
    return c;
  }
  throw Error(ErrorKind::kUsage, "unknown profile '" + std::string(name) + "'");
}

std::vector<std::string> ProfileNames() { return {"desk", "paper-defaults"}; }

std::map<std::string, std::string> ParseKeyValues(std::string_view text) {
  std::map<std::string, std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = Trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kUsage,
                  "config line " + std::to_string(lineno) + ": expected key = value");
    }
    out[Trim(std::string_view(trimmed).substr(0, eq))] =
        Trim(std::string_view(trimmed).substr(eq + 1));
  }
  return out;
}

std::string FormatKeyValues(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace eracl
