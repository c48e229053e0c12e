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

#include <filesystem>
#include <span>
#include <vector>

#include "gir/tensor.hpp"

namespace gir::nd {

struct AdamConfig {
  double learning_rate = 0.01;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Classic Adam with weight decay folded into the gradient as an L2 term.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// Updates every parameter in place. Moments are created on the first call
  /// and shapes are checked on every later one.
  void step(std::span<Parameter* const> params, std::span<const Tensor> grads);

  long long steps() const { return step_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  long long step_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

/// Binary checkpoint: magic "GIRCKPT1", then per parameter the name, shape and
/// little-endian float64 values.
void save_checkpoint(const std::filesystem::path& path, std::span<const Parameter> params);
std::vector<Parameter> load_checkpoint(const std::filesystem::path& path);

}  // namespace gir::nd
