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

#include "eracl/relation_head.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eracl/error.h"

namespace eracl {

using ag::Node;
using ag::Var;

void HeadConfig::Validate() const {
  Check(model_dim > 0 && groups > 0 && model_dim % groups == 0,
        "model_dim must be divisible by the bilinear group count",
        ErrorKind::kUsage);
  Check(num_relations > 0, "relation head needs at least one relation",
        ErrorKind::kUsage);
}

HeadParams HeadParams::Init(const HeadConfig& config, uint64_t seed) {
  config.Validate();
  Rng rng(DeriveSeed(seed, {0x4EADULL}));
  const int d = config.model_dim;
  const double fusion_std = 1.0 / std::sqrt(static_cast<double>(d));
  const double bilinear_std =
      1.0 / std::sqrt(static_cast<double>(d * config.group_size()));
  HeadParams p;
  p.config = config;
  p.w_head = Var::Parameter(RandomNormal(d, d, fusion_std, rng));
  p.w_tail = Var::Parameter(RandomNormal(d, d, fusion_std, rng));
  p.w_ctx_head = Var::Parameter(RandomNormal(d, d, fusion_std, rng));
  p.w_ctx_tail = Var::Parameter(RandomNormal(d, d, fusion_std, rng));
  p.bilinear = Var::Parameter(RandomNormal(
      config.num_classes(), d * config.group_size(), bilinear_std, rng));
  return p;
}

std::vector<NamedParam> HeadParams::FusionParameters() {
  constexpr auto kH = ParamGroup::kHead;
  return {{"head.w_head", &w_head, kH, true},
          {"head.w_tail", &w_tail, kH, true},
          {"head.w_ctx_head", &w_ctx_head, kH, true},
          {"head.w_ctx_tail", &w_ctx_tail, kH, true}};
}

std::vector<NamedParam> HeadParams::Parameters() {
  std::vector<NamedParam> out = FusionParameters();
  out.push_back({"head.bilinear", &bilinear, ParamGroup::kHead, true});
  return out;
}

std::pair<RowVector, RowVector> Fuse(const RowVector& head,
                                     const RowVector& context,
                                     const RowVector& tail,
                                     const HeadParams& params) {
  RowVector h = (head * params.w_head.value() +
                 context * params.w_ctx_head.value())
                    .array()
                    .tanh()
                    .matrix();
  RowVector t = (tail * params.w_tail.value() +
                 context * params.w_ctx_tail.value())
                    .array()
                    .tanh()
                    .matrix();
  return {std::move(h), std::move(t)};
}

std::pair<Var, Var> Fuse(const Var& heads, const Var& contexts,
                         const Var& tails, const HeadParams& params) {
  Var h = ag::Tanh(ag::Add(ag::MatMul(heads, params.w_head),
                           ag::MatMul(contexts, params.w_ctx_head)));
  Var t = ag::Tanh(ag::Add(ag::MatMul(tails, params.w_tail),
                           ag::MatMul(contexts, params.w_ctx_tail)));
  return {h, t};
}

namespace {

Matrix OuterValue(const Matrix& h, const Matrix& t, int groups) {
  const Eigen::Index n = h.rows();
  const Eigen::Index d = h.cols();
  const Eigen::Index b = d / groups;
  Matrix z(n, d * b);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int g = 0; g < groups; ++g) {
      for (Eigen::Index i = 0; i < b; ++i) {
        const double hv = h(r, g * b + i);
        double* out = z.data() + r * z.cols() + (g * b + i) * b;
        const double* tv = t.data() + r * d + g * b;
        for (Eigen::Index j = 0; j < b; ++j) out[j] = hv * tv[j];
      }
    }
  }
  return z;
}

}  // namespace

RowVector Score(const RowVector& h, const RowVector& t,
                const HeadParams& params) {
  const HeadConfig& cfg = params.config;
  Check(h.cols() == cfg.model_dim && t.cols() == cfg.model_dim,
        "score input dimension mismatch");
  Matrix z = OuterValue(h, t, cfg.groups);
  return z * params.bilinear.value().transpose();
}

Var GroupedOuter(const Var& h, const Var& t, int groups) {
  Check(h.rows() == t.rows() && h.cols() == t.cols(),
        "grouped outer shape mismatch");
  Check(groups > 0 && h.cols() % groups == 0,
        "dimension not divisible by group count");
  Matrix z = OuterValue(h.value(), t.value(), groups);
  return ag::MakeOp(std::move(z), {h, t}, [groups](Node& n) {
    Node& hn = *n.parents[0];
    Node& tn = *n.parents[1];
    const Eigen::Index rows = hn.value.rows();
    const Eigen::Index d = hn.value.cols();
    const Eigen::Index b = d / groups;
    Matrix dh = Matrix::Zero(rows, d);
    Matrix dt = Matrix::Zero(rows, d);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int g = 0; g < groups; ++g) {
        for (Eigen::Index i = 0; i < b; ++i) {
          const double* gz = n.grad.data() + r * n.grad.cols() + (g * b + i) * b;
          const double hv = hn.value(r, g * b + i);
          double acc = 0.0;
          for (Eigen::Index j = 0; j < b; ++j) {
            acc += gz[j] * tn.value(r, g * b + j);
            dt(r, g * b + j) += gz[j] * hv;
          }
          dh(r, g * b + i) += acc;
        }
      }
    }
    if (hn.requires_grad) hn.AccumulateGrad(dh);
    if (tn.requires_grad) tn.AccumulateGrad(dt);
  });
}

Var Score(const Var& h, const Var& t, const HeadParams& params) {
  Check(h.cols() == params.config.model_dim, "score input dimension mismatch");
  return ag::MatMulNT(GroupedOuter(h, t, params.config.groups),
                      params.bilinear);
}

namespace {

double LogSumExp(const RowVector& s, const std::vector<int>& idx) {
  double mx = -std::numeric_limits<double>::infinity();
  for (int i : idx) mx = std::max(mx, s(i));
  double sum = 0.0;
  for (int i : idx) sum += std::exp(s(i) - mx);
  return mx + std::log(sum);
}

// Loss and gradient for one row.
double AtlRow(const RowVector& s, std::span<const int> positives,
              RowVector* grad) {
  const int classes = static_cast<int>(s.cols());
  const int th = classes - 1;
  std::vector<bool> is_pos(classes, false);
  for (int r : positives) {
    Check(r >= 0 && r < th, "positive relation index out of range");
    is_pos[r] = true;
  }
  std::vector<int> pos_th, neg_th;
  for (int c = 0; c < th; ++c) (is_pos[c] ? pos_th : neg_th).push_back(c);
  const size_t num_pos = pos_th.size();
  pos_th.push_back(th);
  neg_th.push_back(th);

  if (grad) *grad = RowVector::Zero(classes);
  double loss = 0.0;
  if (num_pos > 0) {
    const double lse = LogSumExp(s, pos_th);
    for (size_t i = 0; i + 1 < pos_th.size(); ++i) loss += lse - s(pos_th[i]);
    if (grad) {
      for (int c : pos_th) {
        (*grad)(c) += static_cast<double>(num_pos) * std::exp(s(c) - lse);
      }
      for (size_t i = 0; i + 1 < pos_th.size(); ++i) (*grad)(pos_th[i]) -= 1.0;
    }
  }
  const double lse = LogSumExp(s, neg_th);
  loss += lse - s(th);
  if (grad) {
    for (int c : neg_th) (*grad)(c) += std::exp(s(c) - lse);
    (*grad)(th) -= 1.0;
  }
  return loss;
}

}  // namespace

double AtlLoss(const RowVector& scores, std::span<const int> positives) {
  return AtlRow(scores, positives, nullptr);
}

Var AtlLoss(const Var& scores, const std::vector<std::vector<int>>& positives) {
  const Eigen::Index n = scores.rows();
  Check(static_cast<size_t>(n) == positives.size() && n > 0,
        "one positive set per score row required");
  Matrix grad(n, scores.cols());
  double total = 0.0;
  for (Eigen::Index r = 0; r < n; ++r) {
    RowVector g;
    total += AtlRow(scores.value().row(r), positives[r], &g);
    grad.row(r) = g;
  }
  const double inv = 1.0 / static_cast<double>(n);
  Matrix out(1, 1);
  out(0, 0) = total * inv;
  grad *= inv;
  return ag::MakeOp(std::move(out), {scores}, [grad](Node& node) {
    node.parents[0]->AccumulateGradExpr(grad * node.grad(0, 0));
  });
}

std::vector<int> Predict(const RowVector& scores) {
  const int th = static_cast<int>(scores.cols()) - 1;
  std::vector<int> out;
  for (int r = 0; r < th; ++r) {
    if (scores(r) > scores(th)) out.push_back(r);
  }
  return out;
}

StackedTriples Stack(std::span<const TripleRepresentation> triples) {
  Check(!triples.empty(), "no triples to stack");
  std::vector<Var> h, c, t;
  h.reserve(triples.size());
  c.reserve(triples.size());
  t.reserve(triples.size());
  for (const auto& tr : triples) {
    h.push_back(tr.head);
    c.push_back(tr.context);
    t.push_back(tr.tail);
  }
  return {ag::ConcatRows(h), ag::ConcatRows(c), ag::ConcatRows(t)};
}

}  // namespace eracl
