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

#include "gir/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "gir/error.hpp"

namespace gir::nd {

Tensor::Tensor(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
  detail::require(data.size() == static_cast<std::size_t>(r) * c, "tensor value count does not match shape");
}

Tensor Tensor::identity(int n) {
  Tensor t(n, n);
  for (int i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  detail::require(rows == 1 && cols == 1, "item() on non-scalar tensor " + shape_string(*this));
  return data[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

std::string shape_string(const Tensor& t) {
  return "(" + std::to_string(t.rows) + "x" + std::to_string(t.cols) + ")";
}

Tensor glorot_uniform(int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor w(fan_in, fan_out);
  for (double& v : w.data) v = uniform_real(rng, -limit, limit);
  return w;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require(a.cols == b.rows, "matmul shape mismatch " + shape_string(a) + " x " + shape_string(b));
  Tensor out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    double* orow = &out.data[static_cast<std::size_t>(i) * b.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = &b.data[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

Tensor softmax_rows(const Tensor& x) {
  Tensor out(x.rows, x.cols);
  for (int r = 0; r < x.rows; ++r) {
    double mx = x(r, 0);
    for (int c = 1; c < x.cols; ++c) mx = std::max(mx, x(r, c));
    double total = 0.0;
    for (int c = 0; c < x.cols; ++c) total += out(r, c) = std::exp(x(r, c) - mx);
    for (int c = 0; c < x.cols; ++c) out(r, c) /= total;
  }
  return out;
}

std::vector<int> argmax_rows(const Tensor& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows));
  for (int r = 0; r < x.rows; ++r) {
    int best = 0;
    for (int c = 1; c < x.cols; ++c) {
      if (x(r, c) > x(r, best)) best = c;
    }
    out[r] = best;
  }
  return out;
}

std::vector<double> row_cross_entropy(const Tensor& logits, const std::vector<int>& labels) {
  detail::require(static_cast<int>(labels.size()) == logits.rows, "label count does not match logit rows");
  std::vector<double> out(labels.size());
  for (int r = 0; r < logits.rows; ++r) {
    detail::require(labels[r] >= 0 && labels[r] < logits.cols, "label out of class range");
    double mx = logits(r, 0);
    for (int c = 1; c < logits.cols; ++c) mx = std::max(mx, logits(r, c));
    double total = 0.0;
    for (int c = 0; c < logits.cols; ++c) total += std::exp(logits(r, c) - mx);
    out[r] = std::log(total) + mx - logits(r, labels[r]);
  }
  return out;
}

}  // namespace gir::nd
