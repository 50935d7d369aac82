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

#include "eracl/relation_encoding.h"

#include <cmath>
#include <string>

#include "eracl/error.h"

namespace eracl {

using ag::Node;
using ag::Var;

namespace {

void CheckMarkers(std::span<const int> markers, Eigen::Index rows) {
  Check(!markers.empty(), "entity has no mentions", ErrorKind::kValidation);
  for (int m : markers) {
    Check(m >= 0 && m < rows, "marker position out of range",
          ErrorKind::kValidation);
  }
}

}  // namespace

RowVector EntityRepresentation(std::span<const int> markers,
                               const Matrix& hidden) {
  CheckMarkers(markers, hidden.rows());
  RowVector mx = hidden.row(markers[0]);
  for (size_t i = 1; i < markers.size(); ++i) {
    mx = mx.cwiseMax(hidden.row(markers[i]));
  }
  RowVector sum = RowVector::Zero(hidden.cols());
  for (int m : markers) sum.array() += (hidden.row(m) - mx).array().exp();
  return mx + sum.array().log().matrix();
}

Var EntityRepresentation(std::span<const int> markers, const Var& hidden) {
  RowVector e = EntityRepresentation(markers, hidden.value());
  std::vector<int> idx(markers.begin(), markers.end());
  Matrix out = e;
  return ag::MakeOp(std::move(out), {hidden}, [idx, e](Node& n) {
    // d e_j / d m_ij = softmax_i(m_ij) = exp(m_ij - e_j).
    Node& h = *n.parents[0];
    Matrix& g = h.GradRef();
    for (int m : idx) {
      g.row(m).array() +=
          n.grad.row(0).array() * (h.value.row(m) - e).array().exp();
    }
  });
}

RowVector EntityAttention(std::span<const int> markers,
                          const Matrix& attention_avg) {
  CheckMarkers(markers, attention_avg.rows());
  RowVector sum = RowVector::Zero(attention_avg.cols());
  for (int m : markers) sum += attention_avg.row(m);
  return sum / static_cast<double>(markers.size());
}

Var EntityAttention(std::span<const int> markers, const Var& attention_avg) {
  Matrix out = EntityAttention(markers, attention_avg.value());
  std::vector<int> idx(markers.begin(), markers.end());
  return ag::MakeOp(std::move(out), {attention_avg}, [idx](Node& n) {
    Matrix& g = n.parents[0]->GradRef();
    const double inv = 1.0 / static_cast<double>(idx.size());
    for (int m : idx) g.row(m) += inv * n.grad.row(0);
  });
}

RowVector MaskedContext(const Matrix& hidden, const RowVector& pair_attention,
                        const RowVector* mask, double eps) {
  const Eigen::Index l = hidden.rows();
  Check(pair_attention.cols() == l, "pair attention length mismatch");
  Check(mask == nullptr || mask->cols() == l, "mask length mismatch");
  const double mass = pair_attention.sum();
  RowVector weights;
  if (mass < eps) {
    weights = RowVector::Constant(l, 1.0 / static_cast<double>(l));
  } else {
    weights = pair_attention / mass;
  }
  if (mask != nullptr) weights = weights.cwiseProduct(*mask);
  return weights * hidden;
}

Var MaskedContext(const Var& hidden, const Var& pair_attention,
                  const RowVector* mask, double eps) {
  const Matrix& h = hidden.value();
  const RowVector a = pair_attention.value();
  const double mass = a.sum();
  const bool fallback = mass < eps;
  RowVector c = MaskedContext(h, a, mask, eps);
  RowVector m = mask ? *mask : RowVector::Ones(h.rows());
  RowVector weights = fallback
                          ? RowVector(RowVector::Constant(
                                h.rows(), 1.0 / static_cast<double>(h.rows())))
                          : RowVector(a / mass);
  weights = weights.cwiseProduct(m);
  Matrix out = c;
  return ag::MakeOp(
      std::move(out), {hidden, pair_attention},
      [weights, m, c, mass, fallback](Node& n) {
        Node& hn = *n.parents[0];
        Node& an = *n.parents[1];
        const RowVector g = n.grad.row(0);
        if (hn.requires_grad) hn.AccumulateGradExpr(weights.transpose() * g);
        if (an.requires_grad && !fallback) {
          // dc/da_j = (m_j H_j - c) / mass.
          RowVector da = (hn.value * g.transpose()).transpose();
          da = (da.cwiseProduct(m).array() - c.dot(g)).matrix() / mass;
          an.AccumulateGrad(da);
        }
      });
}

PairContextResult PairContext(const RowVector& head_attention,
                              const RowVector& tail_attention,
                              const Matrix& hidden, double eps) {
  Check(head_attention.cols() == tail_attention.cols(),
        "entity attention length mismatch");
  PairContextResult out;
  out.pair_attention = head_attention.cwiseProduct(tail_attention);
  out.fallback = out.pair_attention.sum() < eps;
  out.context = MaskedContext(hidden, out.pair_attention, nullptr, eps);
  return out;
}

DocumentFeatures ComputeDocumentFeatures(const EncodingOutput& encoding,
                                         const MarkedDocument& doc) {
  DocumentFeatures f;
  f.hidden = encoding.hidden;
  f.attention_avg = AverageAttentionHeads(encoding.attention);
  f.entity_vectors.reserve(doc.entity_markers.size());
  f.entity_attention.reserve(doc.entity_markers.size());
  for (const auto& markers : doc.entity_markers) {
    f.entity_vectors.push_back(EntityRepresentation(markers, f.hidden));
    f.entity_attention.push_back(EntityAttention(markers, f.attention_avg));
  }
  return f;
}

std::vector<TripleRepresentation> BuildTriples(
    const DocumentFeatures& features, std::span<const TrainingPair> pairs) {
  const int n = static_cast<int>(features.entity_vectors.size());
  std::vector<TripleRepresentation> out;
  out.reserve(pairs.size());
  for (const TrainingPair& pair : pairs) {
    Check(pair.head >= 0 && pair.head < n && pair.tail >= 0 && pair.tail < n,
          "pair entity index out of range (" + std::to_string(pair.head) +
              ", " + std::to_string(pair.tail) + ") for " + std::to_string(n) +
              " entities",
          ErrorKind::kValidation);
    TripleRepresentation t;
    t.head = features.entity_vectors[pair.head];
    t.tail = features.entity_vectors[pair.tail];
    t.pair_attention = ag::Mul(features.entity_attention[pair.head],
                               features.entity_attention[pair.tail]);
    t.context = MaskedContext(features.hidden, t.pair_attention, nullptr);
    t.head_entity = pair.head;
    t.tail_entity = pair.tail;
    t.relations = pair.relations;
    t.origin = Origin::kOriginal;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace eracl
