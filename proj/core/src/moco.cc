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

#include "eracl/moco.h"

#include <algorithm>
#include <cmath>

#include "eracl/error.h"

namespace eracl {

using ag::Node;
using ag::Var;

ProjectionParams ProjectionParams::Init(int model_dim, int proj_dim,
                                        uint64_t seed) {
  Check(model_dim > 0 && proj_dim > 0, "projection dimensions must be positive",
        ErrorKind::kUsage);
  Rng rng(DeriveSeed(seed, {0x960ULL}));
  ProjectionParams p;
  p.w1 = Var::Parameter(RandomNormal(
      2 * model_dim, model_dim, 1.0 / std::sqrt(2.0 * model_dim), rng));
  p.b1 = Var::Parameter(Matrix::Zero(1, model_dim));
  p.w2 = Var::Parameter(RandomNormal(model_dim, proj_dim,
                                     1.0 / std::sqrt(1.0 * model_dim), rng));
  p.b2 = Var::Parameter(Matrix::Zero(1, proj_dim));
  return p;
}

std::vector<NamedParam> ProjectionParams::Parameters() {
  constexpr auto kP = ParamGroup::kProjection;
  return {{"projection.w1", &w1, kP, true},
          {"projection.b1", &b1, kP, false},
          {"projection.w2", &w2, kP, true},
          {"projection.b2", &b2, kP, false}};
}

RowVector Project(const RowVector& h, const RowVector& t,
                  const ProjectionParams& params) {
  RowVector ht(h.cols() + t.cols());
  ht << h, t;
  RowVector hidden = ht * params.w1.value() + params.b1.value();
  RowVector x = (hidden * params.w2.value() + params.b2.value()).cwiseMax(0.0);
  const double norm = x.norm();
  if (norm > 1e-12) return x / norm;
  return RowVector::Zero(x.cols());
}

Var Project(const Var& h, const Var& t, const ProjectionParams& params) {
  const Var parts[] = {h, t};
  Var ht = ag::ConcatCols(parts);
  Var hidden = ag::AddRow(ag::MatMul(ht, params.w1), params.b1);
  Var x = ag::Relu(ag::AddRow(ag::MatMul(hidden, params.w2), params.b2));
  return ag::L2NormalizeRows(x);
}

RelationQueueBank::RelationQueueBank(int num_relations, int capacity, int dim)
    : capacity_(capacity), dim_(dim), queues_(num_relations) {
  Check(capacity > 0 && dim > 0, "queue capacity and dim must be positive",
        ErrorKind::kUsage);
}

bool RelationQueueBank::Enqueue(const RowVector& key,
                                std::span<const int> relations) {
  Check(key.cols() == dim_, "key dimension mismatch");
  const double norm = key.norm();
  if (norm == 0.0) return false;
  Check(std::abs(norm - 1.0) <= 1e-6, "queued keys must be unit-norm");
  for (int r : relations) {
    Check(r >= 0 && r < num_relations(), "relation index out of range");
    auto& q = queues_[r];
    q.push_back(key);
    while (static_cast<int>(q.size()) > capacity_) q.pop_front();
  }
  return !relations.empty();
}

Matrix RelationQueueBank::Gather(std::span<const int> relations) const {
  Eigen::Index rows = 0;
  for (int r : relations) rows += static_cast<Eigen::Index>(queues_[r].size());
  Matrix out(rows, dim_);
  Eigen::Index i = 0;
  for (int r : relations) {
    for (const RowVector& k : queues_[r]) out.row(i++) = k;
  }
  return out;
}

std::vector<Matrix> RelationQueueBank::Export() const {
  std::vector<Matrix> out;
  out.reserve(queues_.size());
  for (const auto& q : queues_) {
    Matrix m(static_cast<Eigen::Index>(q.size()), dim_);
    for (size_t i = 0; i < q.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = q[i];
    out.push_back(std::move(m));
  }
  return out;
}

void RelationQueueBank::Import(const std::vector<Matrix>& queues) {
  Check(queues.size() == queues_.size(), "queue count mismatch");
  for (size_t r = 0; r < queues.size(); ++r) {
    Check(queues[r].rows() <= capacity_ &&
              (queues[r].rows() == 0 || queues[r].cols() == dim_),
          "queue shape mismatch");
    queues_[r].clear();
    for (Eigen::Index i = 0; i < queues[r].rows(); ++i) {
      queues_[r].push_back(queues[r].row(i));
    }
  }
}

void MomentumUpdate(std::span<const Matrix> online, std::span<Matrix> shadow,
                    double momentum) {
  Check(online.size() == shadow.size(), "momentum update tensor count mismatch");
  Check(momentum >= 0.0 && momentum <= 1.0, "momentum must be in [0, 1]",
        ErrorKind::kUsage);
  for (size_t i = 0; i < online.size(); ++i) {
    Check(online[i].rows() == shadow[i].rows() &&
              online[i].cols() == shadow[i].cols(),
          "momentum update shape mismatch");
  }
  for (size_t i = 0; i < online.size(); ++i) {
    shadow[i] = momentum * shadow[i] + (1.0 - momentum) * online[i];
  }
}

void MomentumUpdate(const std::vector<NamedParam>& online,
                    const std::vector<NamedParam>& shadow, double momentum) {
  Check(online.size() == shadow.size(), "momentum update tensor count mismatch");
  std::vector<Matrix> on, sh;
  on.reserve(online.size());
  sh.reserve(shadow.size());
  for (size_t i = 0; i < online.size(); ++i) {
    on.push_back(online[i].var->value());
    sh.push_back(shadow[i].var->value());
  }
  MomentumUpdate(on, sh, momentum);
  for (size_t i = 0; i < shadow.size(); ++i) {
    shadow[i].var->mutable_value() = std::move(sh[i]);
  }
}

double InfoNce(const RowVector& x, const Matrix& positives,
               const Matrix& negatives, double tau, RowVector* grad) {
  Check(tau > 0.0, "InfoNCE temperature must be positive", ErrorKind::kUsage);
  if (grad) *grad = RowVector::Zero(x.cols());
  if (positives.rows() == 0) return 0.0;
  Check(positives.cols() == x.cols() &&
            (negatives.rows() == 0 || negatives.cols() == x.cols()),
        "InfoNCE key dimension mismatch");
  const Eigen::VectorXd sp = positives * x.transpose() / tau;
  Eigen::VectorXd sn;
  if (negatives.rows() > 0) {
    sn = negatives * x.transpose() / tau;
  } else {
    sn.resize(0);
  }
  double shift = sp.maxCoeff();
  if (sn.size() > 0) shift = std::max(shift, sn.maxCoeff());
  const Eigen::VectorXd en = (sn.array() - shift).exp().matrix();
  const double neg_sum = en.sum();

  double loss = 0.0;
  Eigen::VectorXd dsp(sp.size());
  double dneg_scale = 0.0;  // sum_p 1 / denom_p
  for (Eigen::Index i = 0; i < sp.size(); ++i) {
    const double ep = std::exp(sp(i) - shift);
    const double denom = ep + neg_sum;
    loss += std::log(denom) + shift - sp(i);
    dsp(i) = ep / denom - 1.0;
    dneg_scale += 1.0 / denom;
  }
  if (grad) {
    RowVector g = (dsp.transpose() * positives) / tau;
    if (sn.size() > 0) {
      g += (dneg_scale * en.transpose() * negatives) / tau;
    }
    *grad = g;
  }
  return loss;
}

Var InfoNce(const Var& x, const Matrix& positives, const Matrix& negatives,
            double tau) {
  Check(x.rows() == 1, "InfoNCE anchor must be a single row");
  RowVector grad;
  Matrix out(1, 1);
  out(0, 0) = InfoNce(x.value(), positives, negatives, tau, &grad);
  return ag::MakeOp(std::move(out), {x}, [grad](Node& n) {
    n.parents[0]->AccumulateGradExpr(grad * n.grad(0, 0));
  });
}

}  // namespace eracl
