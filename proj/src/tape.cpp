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

#include "gir/tape.hpp"

#include <algorithm>
#include <cmath>

#include "gir/error.hpp"

namespace gir::nd {

Var Tape::constant(Tensor value) {
  if (!value.all_finite()) throw NonFiniteError("non-finite constant " + shape_string(value));
  nodes_.push_back(Node{std::move(value), {}, false, false, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::parameter(const Parameter& p) {
  if (!p.value.all_finite()) throw NonFiniteError("non-finite parameter '" + p.name + "'");
  nodes_.push_back(Node{p.value, {}, true, false, {}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor Tape::grad(Var v) const {
  const Node& node = nodes_.at(v.id);
  if (node.has_grad) return node.grad;
  return Tensor(node.value.rows, node.value.cols);
}

Tensor& Tape::grad_buffer(Var v) {
  Node& node = nodes_.at(v.id);
  if (!node.has_grad) {
    node.grad = Tensor(node.value.rows, node.value.cols);
    node.has_grad = true;
  }
  return node.grad;
}

void Tape::accumulate(Var v, const Tensor& g) {
  if (!nodes_.at(v.id).requires_grad) return;
  Tensor& buf = grad_buffer(v);
  for (std::size_t i = 0; i < buf.data.size(); ++i) buf.data[i] += g.data[i];
}

Var Tape::record(Tensor value, std::span<const Var> inputs, BackwardFn fn, const char* op) {
  if (!value.all_finite()) throw NonFiniteError(std::string("non-finite output from ") + op);
  const bool needs = std::any_of(inputs.begin(), inputs.end(), [&](Var v) { return requires_grad(v); });
  nodes_.push_back(Node{std::move(value), {}, needs, false, needs ? std::move(fn) : BackwardFn{}});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::backward(Var loss) {
  const Tensor& out = value(loss);
  detail::require(out.rows == 1 && out.cols == 1, "backward needs a scalar loss, got " + shape_string(out));
  if (!requires_grad(loss)) return;
  grad_buffer(loss).data[0] += 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& node = nodes_[id];
    if (!node.backward || !node.has_grad) continue;
    // Callbacks only touch gradients of earlier nodes, so this reference stays valid.
    node.backward(*this, node.grad);
  }
}

namespace {

void require_shape(bool ok, const char* op, const Tensor& a, const Tensor& b) {
  if (!ok) detail::fail(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " + shape_string(b));
}

}  // namespace

Var matmul(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require_shape(av.cols == bv.rows, "matmul", av, bv);
  Tensor out = nd::matmul(av, bv);
  const Var in[] = {a, b};
  return t.record(std::move(out), in, [a, b](Tape& tp, const Tensor& g) {
    const Tensor& A = tp.value(a);
    const Tensor& B = tp.value(b);
    if (tp.requires_grad(a)) {
      Tensor& ga = tp.grad_buffer(a);  // G B^T
      for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
          double acc = 0.0;
          for (int j = 0; j < B.cols; ++j) acc += g(i, j) * B(k, j);
          ga(i, k) += acc;
        }
      }
    }
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad_buffer(b);  // A^T G
      for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
          const double aik = A(i, k);
          if (aik == 0.0) continue;
          for (int j = 0; j < B.cols; ++j) gb(k, j) += aik * g(i, j);
        }
      }
    }
  }, "matmul");
}

Var add_row(Tape& t, Var x, Var b) {
  const Tensor& xv = t.value(x);
  const Tensor& bv = t.value(b);
  require_shape(bv.rows == 1 && bv.cols == xv.cols, "add_row", xv, bv);
  Tensor out = xv;
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out(r, c) += bv(0, c);
  const Var in[] = {x, b};
  return t.record(std::move(out), in, [x, b](Tape& tp, const Tensor& g) {
    tp.accumulate(x, g);
    if (tp.requires_grad(b)) {
      Tensor& gb = tp.grad_buffer(b);
      for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) gb(0, c) += g(r, c);
    }
  }, "add_row");
}

Var affine(Tape& t, Var x, Var w, Var b) { return add_row(t, matmul(t, x, w), b); }

Var relu(Tape& t, Var x) {
  Tensor out = t.value(x);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  const Var in[] = {x};
  return t.record(std::move(out), in, [x](Tape& tp, const Tensor& g) {
    const Tensor& xv = tp.value(x);
    Tensor& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      if (xv.data[i] > 0.0) gx.data[i] += g.data[i];
    }
  }, "relu");
}

Var add(Tape& t, Var a, Var b) {
  const Tensor& av = t.value(a);
  const Tensor& bv = t.value(b);
  require_shape(av.same_shape(bv), "add", av, bv);
  Tensor out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += bv.data[i];
  const Var in[] = {a, b};
  return t.record(std::move(out), in, [a, b](Tape& tp, const Tensor& g) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  }, "add");
}

Var scale(Tape& t, Var x, double s) {
  Tensor out = t.value(x);
  for (double& v : out.data) v *= s;
  const Var in[] = {x};
  return t.record(std::move(out), in, [x, s](Tape& tp, const Tensor& g) {
    Tensor& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.data.size(); ++i) gx.data[i] += s * g.data[i];
  }, "scale");
}

Var concat_cols(Tape& t, std::span<const Var> parts) {
  detail::require(!parts.empty(), "concat_cols needs at least one input");
  const int rows = t.value(parts[0]).rows;
  int cols = 0;
  for (Var p : parts) {
    require_shape(t.value(p).rows == rows, "concat_cols", t.value(parts[0]), t.value(p));
    cols += t.value(p).cols;
  }
  Tensor out(rows, cols);
  int offset = 0;
  for (Var p : parts) {
    const Tensor& pv = t.value(p);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < pv.cols; ++c) out(r, offset + c) = pv(r, c);
    offset += pv.cols;
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return t.record(std::move(out), parts, [inputs](Tape& tp, const Tensor& g) {
    int off = 0;
    for (Var p : inputs) {
      const int pc = tp.value(p).cols;
      if (tp.requires_grad(p)) {
        Tensor& gp = tp.grad_buffer(p);
        for (int r = 0; r < g.rows; ++r)
          for (int c = 0; c < pc; ++c) gp(r, c) += g(r, off + c);
      }
      off += pc;
    }
  }, "concat_cols");
}

Var concat_cols(Tape& t, Var a, Var b) {
  const Var parts[] = {a, b};
  return concat_cols(t, std::span<const Var>(parts));
}

Var softmax_rows(Tape& t, Var x) {
  Tensor out = nd::softmax_rows(t.value(x));
  const Var in[] = {x};
  const Var self{static_cast<int>(t.size())};  // id this record will receive
  return t.record(std::move(out), in, [x, self](Tape& tp, const Tensor& g) {
    const Tensor& s = tp.value(self);
    Tensor& gx = tp.grad_buffer(x);
    for (int r = 0; r < s.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < s.cols; ++c) dot += g(r, c) * s(r, c);
      for (int c = 0; c < s.cols; ++c) gx(r, c) += s(r, c) * (g(r, c) - dot);
    }
  }, "softmax_rows");
}

Var grouped_mean(Tape& t, Var h, const std::vector<std::vector<int>>& groups) {
  const Tensor& hv = t.value(h);
  const int d = hv.cols;
  Tensor out(static_cast<int>(groups.size()), d);
  for (std::size_t v = 0; v < groups.size(); ++v) {
    const auto& grp = groups[v];
    if (grp.empty()) continue;
    double* orow = &out.data[v * d];
    for (int u : grp) {
      if (u < 0 || u >= hv.rows) detail::fail("grouped_mean: index " + std::to_string(u) + " out of range");
      const double* hrow = &hv.data[static_cast<std::size_t>(u) * d];
      for (int c = 0; c < d; ++c) orow[c] += hrow[c];
    }
    const double inv = 1.0 / static_cast<double>(grp.size());
    for (int c = 0; c < d; ++c) orow[c] *= inv;
  }
  const Var in[] = {h};
  return t.record(std::move(out), in, [h, &groups](Tape& tp, const Tensor& g) {
    Tensor& gh = tp.grad_buffer(h);
    const int dd = g.cols;
    for (std::size_t v = 0; v < groups.size(); ++v) {
      const auto& grp = groups[v];
      if (grp.empty()) continue;
      const double inv = 1.0 / static_cast<double>(grp.size());
      const double* grow = &g.data[v * dd];
      for (int u : grp) {
        double* hrow = &gh.data[static_cast<std::size_t>(u) * dd];
        for (int c = 0; c < dd; ++c) hrow[c] += inv * grow[c];
      }
    }
  }, "grouped_mean");
}

Var gather_rows(Tape& t, Var x, std::span<const int> rows) {
  const Tensor& xv = t.value(x);
  Tensor out(static_cast<int>(rows.size()), xv.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= xv.rows) detail::fail("gather_rows: index out of range");
    std::copy_n(&xv.data[static_cast<std::size_t>(rows[i]) * xv.cols], xv.cols, &out.data[i * xv.cols]);
  }
  std::vector<int> idx(rows.begin(), rows.end());
  const Var in[] = {x};
  return t.record(std::move(out), in, [x, idx = std::move(idx)](Tape& tp, const Tensor& g) {
    Tensor& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (int c = 0; c < g.cols; ++c) gx(idx[i], c) += g(static_cast<int>(i), c);
  }, "gather_rows");
}

Var pair_dot(Tape& t, Var z, std::span<const std::pair<int, int>> pairs) {
  const Tensor& zv = t.value(z);
  Tensor out(static_cast<int>(pairs.size()), 1);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto [u, v] = pairs[i];
    if (u < 0 || v < 0 || u >= zv.rows || v >= zv.rows) detail::fail("pair_dot: index out of range");
    double acc = 0.0;
    for (int c = 0; c < zv.cols; ++c) acc += zv(u, c) * zv(v, c);
    out(static_cast<int>(i), 0) = acc;
  }
  std::vector<std::pair<int, int>> ps(pairs.begin(), pairs.end());
  const Var in[] = {z};
  return t.record(std::move(out), in, [z, ps = std::move(ps)](Tape& tp, const Tensor& g) {
    const Tensor& zz = tp.value(z);
    Tensor& gz = tp.grad_buffer(z);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const auto [u, v] = ps[i];
      const double gi = g(static_cast<int>(i), 0);
      for (int c = 0; c < zz.cols; ++c) {
        gz(u, c) += gi * zz(v, c);
        gz(v, c) += gi * zz(u, c);
      }
    }
  }, "pair_dot");
}

Var sum_all(Tape& t, Var x) {
  double total = 0.0;
  for (double v : t.value(x).data) total += v;
  const Var in[] = {x};
  return t.record(Tensor::scalar(total), in, [x](Tape& tp, const Tensor& g) {
    Tensor& gx = tp.grad_buffer(x);
    for (double& v : gx.data) v += g.data[0];
  }, "sum_all");
}

Var mean_all(Tape& t, Var x) {
  const auto count = static_cast<double>(t.value(x).size());
  detail::require(count > 0, "mean_all of empty tensor");
  return scale(t, sum_all(t, x), 1.0 / count);
}

Var stop_gradient(Tape& t, Var x) { return t.constant(t.value(x)); }

Var cross_entropy(Tape& t, Var logits, std::span<const int> labels) {
  const Tensor& lv = t.value(logits);
  detail::require(static_cast<int>(labels.size()) == lv.rows, "cross_entropy: label count mismatch");
  detail::require(lv.rows > 0, "cross_entropy: empty batch");
  std::vector<int> ys(labels.begin(), labels.end());
  for (int y : ys) detail::require(y >= 0 && y < lv.cols, "cross_entropy: label out of class range");
  const std::vector<double> per_row = row_cross_entropy(lv, ys);
  double total = 0.0;
  for (double v : per_row) total += v;
  const Var in[] = {logits};
  return t.record(Tensor::scalar(total / lv.rows), in, [logits, ys = std::move(ys)](Tape& tp, const Tensor& g) {
    const Tensor p = nd::softmax_rows(tp.value(logits));
    Tensor& gl = tp.grad_buffer(logits);
    const double s = g.data[0] / p.rows;
    for (int r = 0; r < p.rows; ++r) {
      for (int c = 0; c < p.cols; ++c) gl(r, c) += s * (p(r, c) - (c == ys[r] ? 1.0 : 0.0));
    }
  }, "cross_entropy");
}

Var bce_with_logits(Tape& t, Var logits, std::span<const int> labels) {
  const Tensor& lv = t.value(logits);
  detail::require(lv.cols == 1, "bce_with_logits expects an m x 1 column");
  detail::require(static_cast<int>(labels.size()) == lv.rows && lv.rows > 0, "bce_with_logits: label count mismatch");
  std::vector<int> ys(labels.begin(), labels.end());
  double total = 0.0;
  for (int r = 0; r < lv.rows; ++r) {
    detail::require(ys[r] == 0 || ys[r] == 1, "bce_with_logits: labels must be 0 or 1");
    const double x = lv(r, 0);
    total += std::max(x, 0.0) - x * ys[r] + std::log1p(std::exp(-std::abs(x)));
  }
  const Var in[] = {logits};
  return t.record(Tensor::scalar(total / lv.rows), in, [logits, ys = std::move(ys)](Tape& tp, const Tensor& g) {
    const Tensor& x = tp.value(logits);
    Tensor& gl = tp.grad_buffer(logits);
    const double s = g.data[0] / x.rows;
    for (int r = 0; r < x.rows; ++r) {
      const double v = x(r, 0);
      const double sig = v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
      gl(r, 0) += s * (sig - ys[r]);
    }
  }, "bce_with_logits");
}

Var mix_experts(Tape& t, Var weights, std::span<const Var> experts) {
  const Tensor& w = t.value(weights);
  detail::require(static_cast<int>(experts.size()) == w.cols, "mix_experts: weight columns must equal expert count");
  const Tensor& first = t.value(experts[0]);
  Tensor out(first.rows, first.cols);
  for (std::size_t k = 0; k < experts.size(); ++k) {
    const Tensor& e = t.value(experts[k]);
    require_shape(e.same_shape(first) && e.rows == w.rows, "mix_experts", first, e);
    for (int r = 0; r < e.rows; ++r)
      for (int c = 0; c < e.cols; ++c) out(r, c) += w(r, static_cast<int>(k)) * e(r, c);
  }
  std::vector<Var> inputs{weights};
  inputs.insert(inputs.end(), experts.begin(), experts.end());
  std::vector<Var> ex(experts.begin(), experts.end());
  return t.record(std::move(out), inputs, [weights, ex = std::move(ex)](Tape& tp, const Tensor& g) {
    const Tensor& wv = tp.value(weights);
    for (std::size_t k = 0; k < ex.size(); ++k) {
      const Tensor& e = tp.value(ex[k]);
      const int kk = static_cast<int>(k);
      if (tp.requires_grad(weights)) {
        Tensor& gw = tp.grad_buffer(weights);
        for (int r = 0; r < e.rows; ++r) {
          double acc = 0.0;
          for (int c = 0; c < e.cols; ++c) acc += g(r, c) * e(r, c);
          gw(r, kk) += acc;
        }
      }
      if (tp.requires_grad(ex[k])) {
        Tensor& ge = tp.grad_buffer(ex[k]);
        for (int r = 0; r < e.rows; ++r)
          for (int c = 0; c < e.cols; ++c) ge(r, c) += wv(r, kk) * g(r, c);
      }
    }
  }, "mix_experts");
}

Var soft_cross_entropy(Tape& t, Var weights, const Tensor& target) {
  const Tensor& w = t.value(weights);
  require_shape(w.same_shape(target), "soft_cross_entropy", w, target);
  detail::require(w.rows > 0, "soft_cross_entropy: empty batch");
  static constexpr double kFloor = 1e-300;
  double total = 0.0;
  for (std::size_t i = 0; i < w.data.size(); ++i) total -= target.data[i] * std::log(std::max(w.data[i], kFloor));
  const Var in[] = {weights};
  return t.record(Tensor::scalar(total / w.rows), in, [weights, target](Tape& tp, const Tensor& g) {
    const Tensor& wv = tp.value(weights);
    Tensor& gw = tp.grad_buffer(weights);
    const double s = g.data[0] / wv.rows;
    for (std::size_t i = 0; i < wv.data.size(); ++i) gw.data[i] -= s * target.data[i] / std::max(wv.data[i], kFloor);
  }, "soft_cross_entropy");
}

}  // namespace gir::nd
