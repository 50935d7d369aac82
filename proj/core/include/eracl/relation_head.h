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

// Relation classifier over triple representations: tanh fusion of entity and
// context vectors, grouped bilinear scores for every relation plus a
// threshold class, the adaptive-thresholding loss, and threshold decoding.
//
// Score vectors have num_relations + 1 entries; the threshold class is the
// last one. Weight matrices act on row vectors from the right (x * W).

#ifndef ERACL_RELATION_HEAD_H_
#define ERACL_RELATION_HEAD_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eracl/autograd.h"
#include "eracl/params.h"
#include "eracl/relation_encoding.h"

namespace eracl {

struct HeadConfig {
  int model_dim = 64;
  int num_relations = 0;
  int groups = 8;

  int group_size() const { return model_dim / groups; }
  int num_classes() const { return num_relations + 1; }
  int threshold_class() const { return num_relations; }
  void Validate() const;
};

struct HeadParams {
  HeadConfig config;
  ag::Var w_head, w_tail, w_ctx_head, w_ctx_tail;  // d x d
  // Row c holds class c's k blocks of (d/k x d/k), each block row-major.
  ag::Var bilinear;  // (R + 1) x (d * d/k)

  static HeadParams Init(const HeadConfig& config, uint64_t seed);
  std::vector<NamedParam> Parameters();
  // The fusion matrices only; these are shared with contrastive pretraining.
  std::vector<NamedParam> FusionParameters();
};

// h = tanh(e_h W_h + c W_c1), t = tanh(e_t W_t + c W_c2).
std::pair<RowVector, RowVector> Fuse(const RowVector& head,
                                     const RowVector& context,
                                     const RowVector& tail,
                                     const HeadParams& params);
// Batched over rows.
std::pair<ag::Var, ag::Var> Fuse(const ag::Var& heads, const ag::Var& contexts,
                                 const ag::Var& tails, const HeadParams& params);

// score_c = sum_g h_g^T W_c^g t_g for every class c.
RowVector Score(const RowVector& h, const RowVector& t,
                const HeadParams& params);
// Per-group outer products, row n = [vec(h_g t_g^T)]_g. The scores are this
// times bilinear^T.
ag::Var GroupedOuter(const ag::Var& h, const ag::Var& t, int groups);
ag::Var Score(const ag::Var& h, const ag::Var& t, const HeadParams& params);

// Adaptive-thresholding loss for one score vector (threshold class last).
double AtlLoss(const RowVector& scores, std::span<const int> positives);
// Mean over rows; `positives[n]` belongs to row n.
ag::Var AtlLoss(const ag::Var& scores,
                const std::vector<std::vector<int>>& positives);

// {r : score_r > score_TH}, ascending.
std::vector<int> Predict(const RowVector& scores);

// Stacks triple fields row-wise for batched scoring.
struct StackedTriples {
  ag::Var heads, contexts, tails;
};
StackedTriples Stack(std::span<const TripleRepresentation> triples);

}  // namespace eracl

#endif  // ERACL_RELATION_HEAD_H_
