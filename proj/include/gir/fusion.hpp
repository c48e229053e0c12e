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

#include <cstdint>
#include <span>
#include <vector>

#include "gir/models.hpp"

namespace gir {

/// Affine map from the concatenated expert logits (k * C wide) to k gate
/// logits.
struct GateParams {
  nd::Parameter weight;
  nd::Parameter bias;

  static GateParams init(int experts, int classes, std::uint64_t seed);
  int expert_count() const { return weight.value.cols; }
  std::vector<nd::Parameter*> flat() { return {&weight, &bias}; }
  friend bool operator==(const GateParams&, const GateParams&);
};

struct FusedOutput {
  nd::Tensor logits;   // n x C
  nd::Tensor weights;  // n x k, rows sum to 1
};

/// Untaped gate: weights = softmax(gate(concat logits)), fused = sum_k w_k * logits_k.
FusedOutput gate_fuse(std::span<const nd::Tensor> expert_logits, const GateParams& gate);

/// Taped counterpart; returns the n x k weight matrix and writes the fused
/// logits to `fused`.
nd::Var gate_weights(nd::Tape& t, std::span<const nd::Var> expert_logits, nd::Var w, nd::Var b, nd::Var* fused);

/// softmax(-losses / temperature) per row.
nd::Tensor fwr_target(const nd::Tensor& losses, double temperature);

/// Mean over rows of the cross-entropy between the target built from
/// per-expert losses and the gate weights.
double fwr_penalty(const nd::Tensor& weights, const nd::Tensor& losses, double temperature);

struct Expert {
  ModelConfig config;
  const ModelInputs* inputs = nullptr;  // per-expert feature view
};

/// Ablation switches. The default is the two-stage pretrain-then-freeze recipe.
struct FusionOptions {
  bool pretrain = true;       // false: skip stage 1, train everything jointly
  bool freeze = true;         // false: stage 2 also updates experts
  bool use_fwr = true;
  bool expert_losses = false; // add each expert's own loss (unit weights)
  double fwr_coefficient = 0.1;
  double temperature = 1.0;
  double expert_lr_scale = 1.0;  // stage-2 expert learning rate relative to the gate's
  TrainHyper stage1;
  TrainHyper stage2;
};

/// Named presets: "GCN-GIR", "GCN-GIR-nf", "GCN-GIR-nFWR", "GCN-GIR-J", "GCN-GIR-JA".
FusionOptions fusion_preset(const std::string& name);

struct ECReport {
  std::vector<double> per_expert;
  double aggregate = 0.0;  // mean of per_expert
  std::vector<int> false_count;            // |S^F_i|
  std::vector<int> others_true_count;      // |S^T_~i|
  std::vector<int> corrected_count;        // |S^F_i ∩ S^T_~i|
};

/// Harmonic mean of |S^F_i ∩ S^T_~i| / |S^F_i| and of the same count over
/// |S^T_~i|, per expert. Zero denominators give a zero ratio; a zero ratio
/// gives EC_i = 0.
ECReport expert_complementarity(const std::vector<std::vector<int>>& predictions, std::span<const int> labels);

struct FusionResult {
  std::vector<ModelParams> pretrained;  // after stage 1 (empty when not pretrained)
  std::vector<ModelParams> experts;     // after stage 2
  GateParams gate;
  std::vector<double> expert_test_acc;  // each expert alone, final params
  double fused_test_acc = 0.0;
  double fused_val_acc = 0.0;
  int best_epoch = 0;
  int epochs_run = 0;
  std::vector<std::vector<int>> test_predictions;  // per expert, on split.test
  std::vector<int> fused_test_predictions;
  ECReport ec;
  double frozen_grad_max = 0.0;  // largest |gradient| seen on a frozen expert parameter
};

/// Node classification only. Throws TrainingDiverged when any stage diverges.
FusionResult train_fusion(std::span<const Expert> experts, const LabeledTask& task, const SplitSpec& split,
                          const FusionOptions& options);

}  // namespace gir
