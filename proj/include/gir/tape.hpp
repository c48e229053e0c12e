// Copyright 2026 The GIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "gir/tensor.hpp"

namespace gir::nd {

/// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
};

/// Append-only computation record for reverse-mode differentiation.
///
/// Nodes are appended in evaluation order, so the append order is already a
/// topological order and backward() is a single reverse sweep.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  /// Leaf that never receives gradient.
  Var constant(Tensor value);
  /// Leaf that accumulates gradient.
  Var parameter(const Parameter& p);

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  /// Accumulated gradient; zeros when nothing flowed into `v`.
  Tensor grad(Var v) const;
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Reverse sweep from a 1x1 loss. Throws InvalidArgument on non-scalars.
  void backward(Var loss);

  /// Records an op output. `fn` is only kept if some input requires grad.
  /// Throws NonFiniteError when `value` has NaN/Inf.
  Var record(Tensor value, std::span<const Var> inputs, BackwardFn fn, const char* op);

  /// Adds `g` into the gradient of `v` (no-op for constants).
  void accumulate(Var v, const Tensor& g);
  /// Mutable gradient buffer, allocated on first use.
  Tensor& grad_buffer(Var v);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    bool has_grad = false;
    BackwardFn backward;
  };
  std::vector<Node> nodes_;
};

// Differentiable ops ----------------------------------------------------------

Var matmul(Tape& t, Var a, Var b);
/// x (m x n) plus bias row b (1 x n) broadcast over rows.
Var add_row(Tape& t, Var x, Var b);
/// x W + b.
Var affine(Tape& t, Var x, Var w, Var b);
Var relu(Tape& t, Var x);
Var add(Tape& t, Var a, Var b);
Var scale(Tape& t, Var x, double s);
Var concat_cols(Tape& t, std::span<const Var> parts);
Var concat_cols(Tape& t, Var a, Var b);
Var softmax_rows(Tape& t, Var x);
/// Row v of the result is the mean of rows groups[v] of h; empty group gives a
/// zero row. Result has groups.size() rows. `groups` must outlive the tape.
Var grouped_mean(Tape& t, Var h, const std::vector<std::vector<int>>& groups);
Var gather_rows(Tape& t, Var x, std::span<const int> rows);
/// m x 1 column of dot products z[u] . z[v].
Var pair_dot(Tape& t, Var z, std::span<const std::pair<int, int>> pairs);
Var sum_all(Tape& t, Var x);
Var mean_all(Tape& t, Var x);
/// Blocks gradient flow; forward value is unchanged.
Var stop_gradient(Tape& t, Var x);

/// Mean over rows of -log softmax(logits)[r, labels[r]], computed with
/// max-subtraction.
Var cross_entropy(Tape& t, Var logits, std::span<const int> labels);
/// Mean binary cross-entropy on an m x 1 logit column, stable form
/// max(x,0) - x*y + log(1 + exp(-|x|)).
Var bce_with_logits(Tape& t, Var logits, std::span<const int> labels);

/// Row-wise convex combination: out[r] = sum_k weights[r,k] * experts[k][r].
Var mix_experts(Tape& t, Var weights, std::span<const Var> experts);
/// Mean over rows of -sum_k target[r,k] * log weights[r,k]; target is constant.
Var soft_cross_entropy(Tape& t, Var weights, const Tensor& target);

}  // namespace gir::nd
