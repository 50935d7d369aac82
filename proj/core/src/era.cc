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

#include "eracl/era.h"

#include "eracl/error.h"

namespace eracl {

void EraConfig::Validate() const {
  Check(mask_prob >= 0.0 && mask_prob <= 1.0,
        "ERA mask probability must be in [0, 1]", ErrorKind::kUsage);
  Check(alpha >= 0, "ERA alpha must be non-negative", ErrorKind::kUsage);
}

bool EraConfig::Qualifies(const std::vector<int>& relations) const {
  for (int r : relations) {
    if (r >= 0 && static_cast<size_t>(r) < augment.size() && augment[r]) {
      return true;
    }
  }
  return false;
}

RowVector SampleMask(int length, double p, Rng& rng) {
  Check(p >= 0.0 && p <= 1.0, "mask probability must be in [0, 1]",
        ErrorKind::kUsage);
  RowVector mask(length);
  for (int i = 0; i < length; ++i) mask(i) = rng.Bernoulli(p) ? 0.0 : 1.0;
  return mask;
}

RowVector PerturbContext(const Matrix& hidden, const RowVector& pair_attention,
                         const RowVector& mask) {
  return MaskedContext(hidden, pair_attention, &mask);
}

ag::Var PerturbContext(const ag::Var& hidden, const ag::Var& pair_attention,
                       const RowVector& mask) {
  return MaskedContext(hidden, pair_attention, &mask);
}

AugmentResult Augment(const std::vector<TripleRepresentation>& originals,
                      const ag::Var& hidden, const EraConfig& config,
                      Rng& rng) {
  config.Validate();
  AugmentResult out;
  for (const TripleRepresentation& t : originals) {
    if (!config.Qualifies(t.relations)) continue;
    const int l = static_cast<int>(t.pair_attention.cols());
    for (int i = 0; i < config.alpha; ++i) {
      TripleRepresentation aug = t;
      const RowVector mask = SampleMask(l, config.mask_prob, rng);
      aug.context = PerturbContext(hidden, t.pair_attention, mask);
      aug.origin = Origin::kAugmented;
      out.augmented.push_back(std::move(aug));
    }
  }
  out.all = originals;
  out.all.insert(out.all.end(), out.augmented.begin(), out.augmented.end());
  return out;
}

}  // namespace eracl
