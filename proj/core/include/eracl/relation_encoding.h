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

// Entity-pair representations from encoder output: logsumexp-pooled entity
// vectors and an attention-localised context vector per pair.
//
// Each operation exists twice: a value-level function on plain matrices and
// a differentiable one on ag::Var built on top of it with a hand-written
// backward pass.

#ifndef ERACL_RELATION_ENCODING_H_
#define ERACL_RELATION_ENCODING_H_

#include <span>
#include <vector>

#include "eracl/autograd.h"
#include "eracl/corpus.h"
#include "eracl/encoder.h"

namespace eracl {

inline constexpr double kContextMassEpsilon = 1e-12;

// e[j] = log sum_i exp(H[marker_i, j]), max-shifted.
RowVector EntityRepresentation(std::span<const int> markers, const Matrix& hidden);
ag::Var EntityRepresentation(std::span<const int> markers, const ag::Var& hidden);

// Mean of the head-averaged attention rows at the start markers.
RowVector EntityAttention(std::span<const int> markers,
                          const Matrix& attention_avg);
ag::Var EntityAttention(std::span<const int> markers,
                        const ag::Var& attention_avg);

struct PairContextResult {
  RowVector context;         // c, length d
  RowVector pair_attention;  // unnormalised A_h * A_t, length l
  bool fallback = false;     // true when the product had ~zero mass
};

PairContextResult PairContext(const RowVector& head_attention,
                              const RowVector& tail_attention,
                              const Matrix& hidden,
                              double eps = kContextMassEpsilon);

// c = H^T (mask * a) / sum(a) for unnormalised weights a. With a null mask
// this is the pooled context; with a mask it is the perturbed context whose
// denominator stays unmasked. When sum(a) < eps the weights fall back to the
// uniform 1/l (still masked).
RowVector MaskedContext(const Matrix& hidden, const RowVector& pair_attention,
                        const RowVector* mask,
                        double eps = kContextMassEpsilon);
ag::Var MaskedContext(const ag::Var& hidden, const ag::Var& pair_attention,
                      const RowVector* mask, double eps = kContextMassEpsilon);

enum class Origin { kOriginal, kAugmented };

// An ordered entity pair with its positive relation indices (scheme order).
struct TrainingPair {
  int head = 0;
  int tail = 0;
  std::vector<int> relations;
};

struct TripleRepresentation {
  ag::Var head;            // e_h, 1 x d
  ag::Var context;         // c_{h,t}, 1 x d
  ag::Var tail;            // e_t, 1 x d
  ag::Var pair_attention;  // unnormalised A_{h,t}, 1 x l
  int head_entity = 0;
  int tail_entity = 0;
  std::vector<int> relations;
  Origin origin = Origin::kOriginal;
};

// Per-document quantities shared by every pair: computed once per forward.
struct DocumentFeatures {
  ag::Var hidden;
  ag::Var attention_avg;
  std::vector<ag::Var> entity_vectors;
  std::vector<ag::Var> entity_attention;
};

DocumentFeatures ComputeDocumentFeatures(const EncodingOutput& encoding,
                                         const MarkedDocument& doc);

// One original triple per pair, in input order.
std::vector<TripleRepresentation> BuildTriples(
    const DocumentFeatures& features, std::span<const TrainingPair> pairs);

}  // namespace eracl

#endif  // ERACL_RELATION_ENCODING_H_
