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

// Easy Relation Augmentation: extra training triples for pairs that carry a
// relation from the augment set, made by randomly dropping coordinates of
// the pair's context attention before pooling. Entity vectors and labels of
// an augmented triple are shared with the original; only the context moves.

#ifndef ERACL_ERA_H_
#define ERACL_ERA_H_

#include <vector>

#include "eracl/autograd.h"
#include "eracl/random.h"
#include "eracl/relation_encoding.h"

namespace eracl {

struct EraConfig {
  // Probability that a mask coordinate is zero.
  double mask_prob = 0.1;
  // Augmented copies per qualifying pair.
  int alpha = 2;
  // augment[r] is true when relation index r belongs to the augment set.
  std::vector<bool> augment;

  void Validate() const;
  bool Qualifies(const std::vector<int>& relations) const;
};

// Each coordinate is 0 with probability p and 1 otherwise.
RowVector SampleMask(int length, double p, Rng& rng);

// H^T (mask * a) / sum(a): the denominator is the unmasked mass, so the
// effective weights sum to at most one.
RowVector PerturbContext(const Matrix& hidden, const RowVector& pair_attention,
                         const RowVector& mask);
ag::Var PerturbContext(const ag::Var& hidden, const ag::Var& pair_attention,
                       const RowVector& mask);

struct AugmentResult {
  std::vector<TripleRepresentation> augmented;  // T_aug
  std::vector<TripleRepresentation> all;        // T_orig followed by T_aug
};

// For every original triple whose relations meet the augment set, emits
// `alpha` copies with independent masks. A pair qualifying through several
// relations is still augmented once per slot.
AugmentResult Augment(const std::vector<TripleRepresentation>& originals,
                      const ag::Var& hidden, const EraConfig& config,
                      Rng& rng);

}  // namespace eracl

#endif  // ERACL_ERA_H_
