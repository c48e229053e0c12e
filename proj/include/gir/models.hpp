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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gir/anchors.hpp"
#include "gir/graph.hpp"
#include "gir/schedule.hpp"
#include "gir/tape.hpp"

namespace gir {

enum class Variant { kGcn, kGcnA, kGcnO, kGir, kGirA, kGirO, kGirMix };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);
bool uses_schedule(Variant v);

enum class FeatureMode { kNone, kAnchorOneHot, kNodeOneHot };

FeatureMode feature_mode(Variant v);

/// anchor-onehot appends |anchors| columns (anchor k gets e_k, others zero);
/// node-onehot appends the n x n identity.
NodeFeatures augment_features(const NodeFeatures& x, FeatureMode mode, const AnchorSet* anchors = nullptr);

struct ModelConfig {
  Variant variant = Variant::kGir;
  int layers = 3;
  int hidden = 32;
  int out_dim = 32;  // classes for node classification, embedding width otherwise
  ScheduleMode mode = ScheduleMode::kLiteral;
  int anchor_sets = 1;  // GIR-MIX only

  void validate() const;
};

struct DenseBlock {
  nd::Parameter weight;
  nd::Parameter bias;
};

/// layers[l] holds one block, or one block per anchor set for GIR-MIX.
struct ModelParams {
  std::vector<std::vector<DenseBlock>> layers;

  std::vector<nd::Parameter*> flat();
  std::vector<nd::Parameter> flat_copy() const;
  /// Restores values from a checkpoint by name; shapes must match.
  void assign(std::span<const nd::Parameter> values);

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

/// Everything a forward pass reads besides parameters. Built once per
/// (graph, anchors, config) and shared read-only.
struct ModelInputs {
  nd::Tensor features;
  std::vector<std::vector<int>> gcn_groups;  // in-neighbors plus self
  std::vector<Schedule> schedules;           // one per anchor set
  AnchorSet anchors;
  int node_count = 0;

  static ModelInputs prepare(const ModelConfig& config, const Graph& g, const NodeFeatures& base,
                             const AnchorSet& anchors);
};

/// Glorot-uniform weights, zero biases.
ModelParams init_params(const ModelConfig& config, int input_dim, std::uint64_t seed);

/// relu(D^-1 (A + I) h W + b) over in-neighbors; `groups` holds in-neighbors
/// plus self.
nd::Var gcn_layer(nd::Tape& t, nd::Var h, const std::vector<std::vector<int>>& groups, nd::Var w, nd::Var b,
                  bool apply_relu);

/// relu(concat(h_v, mean_{u in N(v) ∩ SRC} h_u) W + b); nodes with no active
/// source see a zero message.
nd::Var sage_gir_layer(nd::Tape& t, nd::Var h, const std::vector<std::vector<int>>& active_in, nd::Var w,
                       nd::Var b, bool apply_relu);

/// Records the forward pass on `t`. Parameters are registered in flat() order
/// and appended to `param_vars` when given; with `trainable == false` they are
/// recorded as constants.
nd::Var forward(nd::Tape& t, const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs,
                std::vector<nd::Var>* param_vars = nullptr, bool trainable = true);

/// Untaped forward: the n x out_dim embedding matrix.
nd::Tensor embed(const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs);

double pair_score(std::span<const double> zu, std::span<const double> zv);

struct TrainHyper {
  double learning_rate = 0.01;
  double weight_decay = 1e-5;
  int epochs = 200;
  int patience = 50;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
  double val_loss = 0.0;
};

struct TrainResult {
  ModelParams params;  // from the best-validation epoch
  std::vector<EpochRecord> trace;
  int best_epoch = 0;
  double best_val = 0.0;
  double test_metric = 0.0;  // at the best-validation epoch
};

/// Loss over the task items selected by `items`; cross-entropy for node
/// classification, logistic loss on pair scores for pair tasks.
nd::Var task_loss(nd::Tape& t, nd::Var z, const LabeledTask& task, std::span<const int> items);

/// Accuracy (node tasks) or ROC AUC (pair tasks) on the given items.
double task_metric(const nd::Tensor& z, const LabeledTask& task, std::span<const int> items);

/// Untaped task_loss on a fixed embedding.
double task_loss_value(const nd::Tensor& z, const LabeledTask& task, std::span<const int> items);

/// Full-batch Adam training with early stopping on the validation metric;
/// ties in the metric go to the lower validation loss.
/// Throws TrainingDiverged on a non-finite loss.
TrainResult train_model(const ModelConfig& config, const ModelInputs& inputs, const LabeledTask& task,
                        const SplitSpec& split, const TrainHyper& hyper);

/// CSV with the node id in the first column.
void write_embeddings_csv(const std::filesystem::path& path, const nd::Tensor& z);

}  // namespace gir
