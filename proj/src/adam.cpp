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

#include "gir/adam.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "gir/error.hpp"

namespace gir::nd {

void Adam::step(std::span<Parameter* const> params, std::span<const Tensor> grads) {
  detail::require(params.size() == grads.size(), "adam: parameter and gradient counts differ");
  if (first_.empty()) {
    for (const Parameter* p : params) {
      first_.emplace_back(p->value.rows, p->value.cols);
      second_.emplace_back(p->value.rows, p->value.cols);
    }
  }
  detail::require(first_.size() == params.size(), "adam: parameter list changed between steps");
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = params[i]->value;
    const Tensor& g = grads[i];
    detail::require(w.same_shape(g) && w.same_shape(first_[i]), "adam: shape mismatch for '" + params[i]->name + "'");
    for (std::size_t j = 0; j < w.data.size(); ++j) {
      const double grad = g.data[j] + config_.weight_decay * w.data[j];
      double& m = first_[i].data[j];
      double& v = second_[i].data[j];
      m = config_.beta1 * m + (1.0 - config_.beta1) * grad;
      v = config_.beta2 * v + (1.0 - config_.beta2) * grad * grad;
      if (config_.learning_rate != 0.0) {
        w.data[j] -= config_.learning_rate * (m / bc1) / (std::sqrt(v / bc2) + config_.epsilon);
      }
    }
  }
}

namespace {

constexpr char kMagic[8] = {'G', 'I', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw FormatError("truncated checkpoint");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter> params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const Parameter& p : params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(p.name.size()));
    out.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.rows));
    put<std::uint64_t>(out, static_cast<std::uint64_t>(p.value.cols));
    for (double v : p.value.data) put<double>(out, v);
  }
}

std::vector<Parameter> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path.string());
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError("not a checkpoint file: " + path.string());
  }
  const auto count = get<std::uint32_t>(in);
  std::vector<Parameter> params;
  params.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Parameter p;
    p.name.resize(get<std::uint32_t>(in));
    if (!in.read(p.name.data(), static_cast<std::streamsize>(p.name.size()))) throw FormatError("truncated checkpoint");
    const auto rows = get<std::uint64_t>(in);
    const auto cols = get<std::uint64_t>(in);
    if (rows > (1u << 30) || cols > (1u << 30)) throw FormatError("implausible tensor shape in checkpoint");
    p.value = Tensor(static_cast<int>(rows), static_cast<int>(cols));
    for (double& v : p.value.data) v = get<double>(in);
    params.push_back(std::move(p));
  }
  return params;
}

}  // namespace gir::nd
