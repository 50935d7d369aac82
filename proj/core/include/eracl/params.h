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

#ifndef ERACL_PARAMS_H_
#define ERACL_PARAMS_H_

#include <string>
#include <vector>

#include "eracl/autograd.h"
#include "eracl/random.h"

namespace eracl {

// Optimiser parameter groups. Backbone and head run at different learning
// rates during fine-tuning; the projection only exists for pretraining.
enum class ParamGroup { kBackbone, kHead, kProjection };

struct NamedParam {
  std::string name;
  ag::Var* var;
  ParamGroup group;
  bool decay;  // false for biases and norm gains
};

inline Matrix RandomNormal(Eigen::Index rows, Eigen::Index cols, double stddev,
                           Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = stddev * rng.Normal();
  return m;
}

// Replaces every Var with a gradient-free constant holding a copy of its
// value. Used for the momentum encoder's shadow parameters.
inline void DetachInto(const std::vector<NamedParam>& from,
                       const std::vector<NamedParam>& to) {
  for (size_t i = 0; i < from.size(); ++i) {
    *to[i].var = ag::Var::Constant(from[i].var->value());
  }
}

}  // namespace eracl

#endif  // ERACL_PARAMS_H_
