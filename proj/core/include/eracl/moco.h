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

// Momentum-contrast pretraining pieces: the projection MLP, per-relation key
// queues, the momentum (EMA) update of shadow parameters, and the InfoNCE
// objective against queued keys.

#ifndef ERACL_MOCO_H_
#define ERACL_MOCO_H_

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "eracl/autograd.h"
#include "eracl/params.h"

namespace eracl {

struct ProjectionParams {
  ag::Var w1;  // 2d x d
  ag::Var b1;  // 1 x d
  ag::Var w2;  // d x d_r
  ag::Var b2;  // 1 x d_r

  static ProjectionParams Init(int model_dim, int proj_dim, uint64_t seed);
  std::vector<NamedParam> Parameters();
  int proj_dim() const { return static_cast<int>(w2.cols()); }
};

// x = relu((([h:t] W1 + b1) W2) + b2), then l2-normalised. An all-zero
// output stays zero.
RowVector Project(const RowVector& h, const RowVector& t,
                  const ProjectionParams& params);
ag::Var Project(const ag::Var& h, const ag::Var& t,
                const ProjectionParams& params);

// FIFO queue of detached, unit-norm keys for each relation.
class RelationQueueBank {
 public:
  RelationQueueBank() = default;
  RelationQueueBank(int num_relations, int capacity, int dim);

  // Appends `key` to the queue of every relation in `relations`, evicting
  // the oldest entry past capacity. Zero keys are dropped; returns whether
  // the key was stored.
  bool Enqueue(const RowVector& key, std::span<const int> relations);

  int num_relations() const { return static_cast<int>(queues_.size()); }
  int capacity() const { return capacity_; }
  int dim() const { return dim_; }
  const std::deque<RowVector>& queue(int relation) const {
    return queues_[relation];
  }
  // Keys of the union of the given queues, stacked as rows in queue order.
  // A key pushed to several of them appears once per queue.
  Matrix Gather(std::span<const int> relations) const;

  // Flat row-major storage for checkpoints: one matrix per relation.
  std::vector<Matrix> Export() const;
  void Import(const std::vector<Matrix>& queues);

 private:
  int capacity_ = 0;
  int dim_ = 0;
  std::vector<std::deque<RowVector>> queues_;
};

// shadow <- m * shadow + (1 - m) * online, elementwise, for every tensor.
void MomentumUpdate(std::span<const Matrix> online, std::span<Matrix> shadow,
                    double momentum);
void MomentumUpdate(const std::vector<NamedParam>& online,
                    const std::vector<NamedParam>& shadow, double momentum);

// L = -sum_{p in P} log(e^{x.p/tau} / (e^{x.p/tau} + sum_{n in N} e^{x.n/tau}))
// Keys are rows of `positives` and `negatives`. Returns 0 for empty P.
double InfoNce(const RowVector& x, const Matrix& positives,
               const Matrix& negatives, double tau, RowVector* grad = nullptr);
// Gradient flows into `x` only; keys are constants.
ag::Var InfoNce(const ag::Var& x, const Matrix& positives,
                const Matrix& negatives, double tau);

}  // namespace eracl

#endif  // ERACL_MOCO_H_
