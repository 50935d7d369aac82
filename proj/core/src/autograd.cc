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

#include "eracl/autograd.h"

#include <cmath>
#include <numbers>
#include <unordered_set>
#include <utility>

#include "eracl/error.h"

namespace eracl::ag {

void Node::AccumulateGrad(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Matrix& Node::GradRef() {
  if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
  return grad;
}

Var Var::Constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return FromNode(std::move(node));
}

Var Var::Parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return FromNode(std::move(node));
}

Var MakeOp(Matrix value, std::vector<Var> parents,
           std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const Var& p : parents) {
    if (p.requires_grad()) node->requires_grad = true;
  }
  if (node->requires_grad) {
    node->parents.reserve(parents.size());
    for (Var& p : parents) node->parents.push_back(p.node());
    node->backward = std::move(backward);
  }
  return Var::FromNode(std::move(node));
}

void Backward(const Var& root) {
  Check(root.defined() && root.rows() == 1 && root.cols() == 1,
        "Backward expects a 1x1 root");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS yields a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.node().get(), 0);
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && !visited.count(parent)) {
        visited.insert(parent);
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->AccumulateGrad(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() != 0) node->backward(*node);
  }
  // Interior gradients are not needed after propagation; leaves keep theirs.
  for (Node* node : order) {
    if (node->backward) node->grad.resize(0, 0);
  }
}

namespace {

Node& P(Node& n, size_t i) { return *n.parents[i]; }

}  // namespace

Var MatMul(const Var& a, const Var& b) {
  Check(a.cols() == b.rows(), "MatMul shape mismatch");
  Matrix out = a.value() * b.value();
  return MakeOp(std::move(out), {a, b}, [](Node& n) {
    Node& a = P(n, 0);
    Node& b = P(n, 1);
    if (a.requires_grad) a.AccumulateGradExpr(n.grad * b.value.transpose());
    if (b.requires_grad) b.AccumulateGradExpr(a.value.transpose() * n.grad);
  });
}

Var MatMulNT(const Var& a, const Var& b) {
  Check(a.cols() == b.cols(), "MatMulNT shape mismatch");
  Matrix out = a.value() * b.value().transpose();
  return MakeOp(std::move(out), {a, b}, [](Node& n) {
    Node& a = P(n, 0);
    Node& b = P(n, 1);
    if (a.requires_grad) a.AccumulateGradExpr(n.grad * b.value);
    if (b.requires_grad) b.AccumulateGradExpr(n.grad.transpose() * a.value);
  });
}

Var Add(const Var& a, const Var& b) {
  Check(a.rows() == b.rows() && a.cols() == b.cols(), "Add shape mismatch");
  return MakeOp(a.value() + b.value(), {a, b}, [](Node& n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) P(n, 1).AccumulateGrad(n.grad);
  });
}

Var Sub(const Var& a, const Var& b) {
  Check(a.rows() == b.rows() && a.cols() == b.cols(), "Sub shape mismatch");
  return MakeOp(a.value() - b.value(), {a, b}, [](Node& n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) P(n, 1).AccumulateGradExpr(-n.grad);
  });
}

Var AddRow(const Var& a, const Var& row) {
  Check(row.rows() == 1 && row.cols() == a.cols(), "AddRow shape mismatch");
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  return MakeOp(std::move(out), {a, row}, [](Node& n) {
    if (P(n, 0).requires_grad) P(n, 0).AccumulateGrad(n.grad);
    if (P(n, 1).requires_grad) {
      P(n, 1).AccumulateGradExpr(n.grad.colwise().sum());
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  Check(a.rows() == b.rows() && a.cols() == b.cols(), "Mul shape mismatch");
  Matrix out = a.value().cwiseProduct(b.value());
  return MakeOp(std::move(out), {a, b}, [](Node& n) {
    Node& a = P(n, 0);
    Node& b = P(n, 1);
    if (a.requires_grad) a.AccumulateGradExpr(n.grad.cwiseProduct(b.value));
    if (b.requires_grad) b.AccumulateGradExpr(n.grad.cwiseProduct(a.value));
  });
}

Var Scale(const Var& a, double s) {
  return MakeOp(a.value() * s, {a}, [s](Node& n) {
    P(n, 0).AccumulateGradExpr(n.grad * s);
  });
}

Var MulConst(const Var& a, const Matrix& c) {
  Check(a.rows() == c.rows() && a.cols() == c.cols(),
        "MulConst shape mismatch");
  return MakeOp(a.value().cwiseProduct(c), {a}, [c](Node& n) {
    P(n, 0).AccumulateGradExpr(n.grad.cwiseProduct(c));
  });
}

Var Tanh(const Var& a) {
  Matrix out = a.value().array().tanh().matrix();
  return MakeOp(out, {a}, [out](Node& n) {
    P(n, 0).AccumulateGradExpr(
        (n.grad.array() * (1.0 - out.array().square())).matrix());
  });
}

Var Relu(const Var& a) {
  Matrix out = a.value().cwiseMax(0.0);
  return MakeOp(std::move(out), {a}, [](Node& n) {
    Node& a = P(n, 0);
    a.AccumulateGradExpr(
        (a.value.array() > 0.0).select(n.grad.array(), 0.0).matrix());
  });
}

Var Gelu(const Var& a) {
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Matrix out = a.value().unaryExpr([inv_sqrt2](double x) {
    return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
  });
  return MakeOp(std::move(out), {a}, [inv_sqrt2](Node& n) {
    Node& a = P(n, 0);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    Matrix d = a.value.unaryExpr([&](double x) {
      return 0.5 * (1.0 + std::erf(x * inv_sqrt2)) +
             x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
    });
    a.AccumulateGradExpr(n.grad.cwiseProduct(d));
  });
}

Var SoftmaxRows(const Var& a) {
  Matrix out(a.rows(), a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double mx = a.value().row(i).maxCoeff();
    out.row(i) = (a.value().row(i).array() - mx).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  return MakeOp(out, {a}, [out](Node& n) {
    // dx = y * (g - <g, y>) per row.
    Matrix dx(out.rows(), out.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double dot = n.grad.row(i).dot(out.row(i));
      dx.row(i) =
          (out.row(i).array() * (n.grad.row(i).array() - dot)).matrix();
    }
    P(n, 0).AccumulateGrad(dx);
  });
}

Var LayerNormRows(const Var& x, const Var& gain, const Var& bias,
                  double eps) {
  const Eigen::Index rows = x.rows();
  const Eigen::Index cols = x.cols();
  Check(gain.rows() == 1 && gain.cols() == cols && bias.rows() == 1 &&
            bias.cols() == cols,
        "LayerNorm parameter shape mismatch");
  Matrix xhat(rows, cols);
  Eigen::VectorXd inv_std(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double mean = x.value().row(i).mean();
    const double var =
        (x.value().row(i).array() - mean).square().sum() / cols;
    inv_std(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = (x.value().row(i).array() - mean) * inv_std(i);
  }
  Matrix out = xhat;
  for (Eigen::Index i = 0; i < rows; ++i) {
    out.row(i) = (xhat.row(i).array() * gain.value().row(0).array() +
                  bias.value().row(0).array())
                     .matrix();
  }
  return MakeOp(std::move(out), {x, gain, bias},
                [xhat, inv_std](Node& n) {
                  Node& x = P(n, 0);
                  Node& gain = P(n, 1);
                  Node& bias = P(n, 2);
                  const double cols = static_cast<double>(xhat.cols());
                  if (gain.requires_grad) {
                    gain.AccumulateGradExpr(
                        n.grad.cwiseProduct(xhat).colwise().sum());
                  }
                  if (bias.requires_grad) {
                    bias.AccumulateGradExpr(n.grad.colwise().sum());
                  }
                  if (x.requires_grad) {
                    Matrix dx(xhat.rows(), xhat.cols());
                    for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
                      RowVector g = (n.grad.row(i).array() *
                                     gain.value.row(0).array())
                                        .matrix();
                      const double gsum = g.sum();
                      const double gdot = g.dot(xhat.row(i));
                      dx.row(i) = (inv_std(i) / cols) *
                                  (cols * g.array() - gsum -
                                   xhat.row(i).array() * gdot)
                                      .matrix();
                    }
                    x.AccumulateGrad(dx);
                  }
                });
}

Var GatherRows(const Var& table, std::span<const int> indices) {
  Matrix out(static_cast<Eigen::Index>(indices.size()), table.cols());
  for (size_t i = 0; i < indices.size(); ++i) {
    Check(indices[i] >= 0 && indices[i] < table.rows(),
          "GatherRows index out of range");
    out.row(static_cast<Eigen::Index>(i)) = table.value().row(indices[i]);
  }
  std::vector<int> idx(indices.begin(), indices.end());
  return MakeOp(std::move(out), {table}, [idx = std::move(idx)](Node& n) {
    Matrix& g = P(n, 0).GradRef();
    for (size_t i = 0; i < idx.size(); ++i) {
      g.row(idx[i]) += n.grad.row(static_cast<Eigen::Index>(i));
    }
  });
}

Var SliceCols(const Var& a, Eigen::Index start, Eigen::Index count) {
  Check(start >= 0 && count >= 0 && start + count <= a.cols(),
        "SliceCols out of range");
  Matrix out = a.value().middleCols(start, count);
  return MakeOp(std::move(out), {a}, [start, count](Node& n) {
    P(n, 0).GradRef().middleCols(start, count) += n.grad;
  });
}

Var ConcatCols(std::span<const Var> parts) {
  Check(!parts.empty(), "ConcatCols of nothing");
  Eigen::Index cols = 0;
  for (const Var& p : parts) {
    Check(p.rows() == parts[0].rows(), "ConcatCols row mismatch");
    cols += p.cols();
  }
  Matrix out(parts[0].rows(), cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return MakeOp(std::move(out), std::move(parents), [](Node& n) {
    Eigen::Index offset = 0;
    for (auto& parent : n.parents) {
      const Eigen::Index c = parent->value.cols();
      if (parent->requires_grad) {
        parent->AccumulateGradExpr(n.grad.middleCols(offset, c));
      }
      offset += c;
    }
  });
}

Var ConcatRows(std::span<const Var> parts) {
  Check(!parts.empty(), "ConcatRows of nothing");
  Eigen::Index rows = 0;
  for (const Var& p : parts) {
    Check(p.cols() == parts[0].cols(), "ConcatRows column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, parts[0].cols());
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    offset += p.rows();
  }
  std::vector<Var> parents(parts.begin(), parts.end());
  return MakeOp(std::move(out), std::move(parents), [](Node& n) {
    Eigen::Index offset = 0;
    for (auto& parent : n.parents) {
      const Eigen::Index r = parent->value.rows();
      if (parent->requires_grad) {
        parent->AccumulateGradExpr(n.grad.middleRows(offset, r));
      }
      offset += r;
    }
  });
}

Var Row(const Var& a, Eigen::Index i) {
  Check(i >= 0 && i < a.rows(), "Row index out of range");
  Matrix out = a.value().row(i);
  return MakeOp(std::move(out), {a}, [i](Node& n) {
    P(n, 0).GradRef().row(i) += n.grad.row(0);
  });
}

Var SumAll(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return MakeOp(std::move(out), {a}, [](Node& n) {
    Node& a = P(n, 0);
    a.AccumulateGradExpr(
        Matrix::Constant(a.value.rows(), a.value.cols(), n.grad(0, 0)));
  });
}

Var MeanAll(const Var& a) {
  const double count = static_cast<double>(a.value().size());
  Check(count > 0, "MeanAll of empty matrix");
  return Scale(SumAll(a), 1.0 / count);
}

Var MeanOf(std::span<const Var> parts) {
  Check(!parts.empty(), "MeanOf of nothing");
  Matrix out = parts[0].value();
  for (size_t i = 1; i < parts.size(); ++i) {
    Check(parts[i].rows() == out.rows() && parts[i].cols() == out.cols(),
          "MeanOf shape mismatch");
    out += parts[i].value();
  }
  const double inv = 1.0 / static_cast<double>(parts.size());
  out *= inv;
  std::vector<Var> parents(parts.begin(), parts.end());
  return MakeOp(std::move(out), std::move(parents), [inv](Node& n) {
    for (auto& parent : n.parents) {
      if (parent->requires_grad) parent->AccumulateGradExpr(n.grad * inv);
    }
  });
}

Var L2NormalizeRows(const Var& a, double eps) {
  Matrix out = a.value();
  Eigen::VectorXd norms(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    norms(i) = a.value().row(i).norm();
    if (norms(i) > eps) {
      out.row(i) /= norms(i);
    } else {
      out.row(i).setZero();
    }
  }
  return MakeOp(out, {a}, [out, norms, eps](Node& n) {
    Matrix dx = Matrix::Zero(out.rows(), out.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (norms(i) <= eps) continue;
      const double dot = n.grad.row(i).dot(out.row(i));
      dx.row(i) = (n.grad.row(i) - dot * out.row(i)) / norms(i);
    }
    P(n, 0).AccumulateGrad(dx);
  });
}

}  // namespace eracl::ag
