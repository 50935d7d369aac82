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

// Minimal reverse-mode automatic differentiation over dense row-major
// double matrices. A graph is built implicitly by the op functions below and
// torn down when the last Var referencing it goes away. Vectors are 1xN rows.

#ifndef ERACL_AUTOGRAD_H_
#define ERACL_AUTOGRAD_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eracl {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

namespace ag {

struct Node {
  Matrix value;
  Matrix grad;  // sized lazily on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Propagates this->grad into parents' grads.
  std::function<void(Node&)> backward;

  void AccumulateGrad(const Matrix& g);
  template <typename Expr>
  void AccumulateGradExpr(const Expr& g) {
    if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
    grad.noalias() += g;
  }
  Matrix& GradRef();
};

class Var {
 public:
  Var() = default;

  // A leaf that never receives gradient.
  static Var Constant(Matrix value);
  // A leaf whose gradient accumulates across Backward calls until ZeroGrad.
  static Var Parameter(Matrix value);

  bool defined() const { return node_ != nullptr; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  // Empty matrix when no gradient has reached this node.
  const Matrix& grad() const { return node_->grad; }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  Eigen::Index rows() const { return node_->value.rows(); }
  Eigen::Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  void ZeroGrad() { node_->grad.resize(0, 0); }
  // Overwrites the gradient buffer; used by clipping.
  Matrix& mutable_grad() { return node_->GradRef(); }

  const std::shared_ptr<Node>& node() const { return node_; }
  static Var FromNode(std::shared_ptr<Node> node) {
    Var v;
    v.node_ = std::move(node);
    return v;
  }

 private:
  std::shared_ptr<Node> node_;
};

// Builds a non-leaf node. `backward` receives the node itself; the node's
// parents are reachable through node.parents in the order given here.
Var MakeOp(Matrix value, std::vector<Var> parents,
           std::function<void(Node&)> backward);

// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to every reachable
// node that requires grad.
void Backward(const Var& root);

Var MatMul(const Var& a, const Var& b);
// a * b^T
Var MatMulNT(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
// Adds a 1xN row to every row of a.
Var AddRow(const Var& a, const Var& row);
Var Mul(const Var& a, const Var& b);
Var Scale(const Var& a, double s);
// Elementwise product with a constant matrix (dropout, masks).
Var MulConst(const Var& a, const Matrix& c);
Var Tanh(const Var& a);
Var Relu(const Var& a);
// Exact erf-based GELU; smooth everywhere, which finite differences need.
Var Gelu(const Var& a);
Var SoftmaxRows(const Var& a);
Var LayerNormRows(const Var& x, const Var& gain, const Var& bias,
                  double eps = 1e-5);
Var GatherRows(const Var& table, std::span<const int> indices);
Var SliceCols(const Var& a, Eigen::Index start, Eigen::Index count);
Var ConcatCols(std::span<const Var> parts);
Var ConcatRows(std::span<const Var> parts);
Var Row(const Var& a, Eigen::Index i);
Var SumAll(const Var& a);
Var MeanAll(const Var& a);
// Elementwise mean of equally-shaped inputs.
Var MeanOf(std::span<const Var> parts);
// Row-wise l2 normalisation; an all-zero row maps to zero with zero gradient.
Var L2NormalizeRows(const Var& a, double eps = 1e-12);

}  // namespace ag
}  // namespace eracl

#endif  // ERACL_AUTOGRAD_H_
