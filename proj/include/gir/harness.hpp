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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gir/anchors.hpp"
#include "gir/fusion.hpp"
#include "gir/generators.hpp"
#include "gir/models.hpp"

namespace gir {

/// JSON-backed experiment description. See README for the schema.
struct ExperimentConfig {
  std::string dataset;                 // name written to the CSV
  std::string generator;               // desk stand-in name; empty when reading files
  std::filesystem::path edge_list;
  std::filesystem::path label_file;
  bool bidirected = true;
  TaskKind task = TaskKind::kNodeClassification;
  std::uint64_t data_seed = 0;

  std::vector<Variant> variants;
  ModelConfig model;                   // variant is overwritten per run
  int anchor_count = 64;
  AnchorStrategy anchor_strategy = AnchorStrategy::kGreedyCover;
  TrainHyper hyper;
  std::vector<std::uint64_t> seeds;
  std::vector<std::uint64_t> split_seeds;
  std::filesystem::path output;
  int jobs = 1;

  /// Relative paths resolve against `base_dir`.
  static ExperimentConfig from_json_text(const std::string& text, const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);
  void validate() const;
};

struct RunRecord {
  std::string dataset;
  std::string task;
  std::string variant;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::string metric_name;
  double metric_value = 0.0;
  int epochs_run = 0;
  long long wall_ms = 0;
  bool diverged = false;
};

struct Summary {
  std::string dataset;
  std::string task;
  std::string variant;
  std::string metric_name;
  int runs = 0;
  int diverged = 0;  // excluded from the statistics below
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
  double min = 0.0;
  double max = 0.0;
};

Dataset load_dataset(const ExperimentConfig& config);

/// Graph used for message passing. For link prediction the validation and
/// test positives are removed in both directions.
Graph message_graph(const Dataset& data, const SplitSpec& split);

/// Every (split seed x variant x model seed) run, sorted by
/// (dataset, task, variant, split_seed, seed).
std::vector<RunRecord> run_experiment(const ExperimentConfig& config);

/// Groups by (dataset, task, variant, metric_name) in sorted order.
std::vector<Summary> aggregate_runs(std::span<const RunRecord> runs);

/// Columns: dataset,task,variant,seed,split_seed,metric_name,metric_value,epochs_run,wall_ms,status
void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs);
std::vector<RunRecord> read_runs_csv(std::istream& in);
void write_summary_csv(std::ostream& out, std::span<const Summary> rows);

struct FusionExperimentConfig {
  int hubs_per_side = 150;
  std::uint64_t data_seed = 0;
  std::uint64_t split_seed = 0;
  std::vector<std::string> presets{"GCN-GIR"};
  std::vector<std::uint64_t> seeds{0};
  int layers = 3;
  int hidden = 16;
  ScheduleMode mode = ScheduleMode::kLiteral;
  double fwr_coefficient = 0.1;
  double temperature = 1.0;
  double expert_lr_scale = 1.0;
  TrainHyper stage1;
  TrainHyper stage2;
  std::filesystem::path output;

  static FusionExperimentConfig from_json_text(const std::string& text, const std::filesystem::path& base_dir = {});
  static FusionExperimentConfig load(const std::filesystem::path& path);
};

struct FusionRun {
  std::string preset;
  std::uint64_t seed = 0;
  FusionResult result;
};

/// Trains a GCN expert on the attribute view and a GIR expert on the
/// structure view of the two-view fixture, then fuses them per preset.
std::vector<FusionRun> run_fusion_experiment(const FusionExperimentConfig& config);

/// One row per (preset, seed, metric) with metrics fused_accuracy,
/// expert0_accuracy, expert1_accuracy, ec.
std::vector<RunRecord> fusion_records(std::span<const FusionRun> runs);

/// CSV with a "label" column and one prediction column per expert.
struct PredictionTable {
  std::vector<std::string> experts;
  std::vector<int> labels;
  std::vector<std::vector<int>> predictions;  // per expert
};
PredictionTable read_prediction_csv(std::istream& in);

}  // namespace gir
