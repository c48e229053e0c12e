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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "gir/error.hpp"
#include "gir/generators.hpp"
#include "gir/harness.hpp"

namespace gir {
namespace {

namespace fs = std::filesystem;

RunRecord record(std::string variant, std::uint64_t seed, double value, bool diverged = false) {
  RunRecord r;
  r.dataset = "toy";
  r.task = "nc";
  r.variant = std::move(variant);
  r.seed = seed;
  r.metric_name = "accuracy";
  r.metric_value = value;
  r.epochs_run = 3;
  r.wall_ms = 17;
  r.diverged = diverged;
  return r;
}

std::string csv_of(std::span<const RunRecord> runs) {
  std::ostringstream out;
  write_runs_csv(out, runs);
  return out.str();
}

// Blanks the wall_ms column, the only field allowed to differ across reruns.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string out, line;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    f.at(8) = "-";
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    out += '\n';
  }
  return out;
}

TEST(Config, DeskGeneratorFillsPresetSizes) {
  const auto c = ExperimentConfig::from_json_text(R"({"generator": "europe-nc", "protocol": "desk",
      "variants": ["GIR", "GIR-MIX"], "model": {"mode": "bfs-shell"}})");
  EXPECT_EQ(c.task, TaskKind::kNodeClassification);
  EXPECT_EQ(c.model.hidden, 16);
  EXPECT_EQ(c.anchor_count, 8);
  EXPECT_EQ(c.model.anchor_sets, 4);
  EXPECT_EQ(c.model.mode, ScheduleMode::kBfsShell);
  EXPECT_EQ(c.seeds.size(), 5u);
  EXPECT_EQ(c.split_seeds.size(), 3u);
  EXPECT_EQ(c.hyper.learning_rate, 0.01);
  EXPECT_EQ(c.hyper.weight_decay, 1e-5);
}

TEST(Config, FullProtocolDefaults) {
  const auto c = ExperimentConfig::from_json_text(R"({"generator": "pb-lp"})");
  EXPECT_EQ(c.task, TaskKind::kLinkPrediction);
  EXPECT_EQ(c.seeds.size(), 20u);
  EXPECT_EQ(c.split_seeds.size(), 5u);
  EXPECT_EQ(c.model.layers, 3);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(ExperimentConfig::from_json_text("{not json"), FormatError);
  EXPECT_THROW(ExperimentConfig::from_json_text("[1, 2]"), FormatError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"generator": "pb-lp", "protocol": "quick"})"), FormatError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"generator": "pb-lp", "variants": ["MLP"]})"), FormatError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"generator": "pb-lp", "seeds": "zero"})"), FormatError);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"edge_list": "/nonexistent/e.txt", "labels": "/x"})"),
               InvalidArgument);
  EXPECT_THROW(ExperimentConfig::from_json_text(R"({"generator": "pb-lp", "seeds": []})"), InvalidArgument);
}

TEST(Config, ShippedConfigsLoad) {
  const fs::path dir = fs::path(GIR_SOURCE_DIR) / "configs";
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    if (entry.path().stem() == "fusion") {
      EXPECT_NO_THROW(FusionExperimentConfig::load(entry.path()));
    } else {
      EXPECT_NO_THROW(ExperimentConfig::load(entry.path())) << entry.path();
    }
  }
  EXPECT_EQ(count, 7);
}

TEST(Aggregate, MeanAndSampleDeviation) {
  const std::vector<RunRecord> runs{record("GIR", 0, 1.0), record("GIR", 1, 3.0), record("GCN", 0, 0.25)};
  const auto s = aggregate_runs(runs);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].variant, "GCN");
  EXPECT_EQ(s[0].stddev, 0.0);
  EXPECT_EQ(s[1].mean, 2.0);
  EXPECT_NEAR(s[1].stddev, std::sqrt(2.0), 1e-15);
  EXPECT_EQ(s[1].min, 1.0);
  EXPECT_EQ(s[1].max, 3.0);
}

TEST(Aggregate, DivergedRunsAreCountedButExcluded) {
  const std::vector<RunRecord> runs{record("GIR", 0, 0.5), record("GIR", 1, std::nan(""), true)};
  const auto s = aggregate_runs(runs);
  EXPECT_EQ(s[0].runs, 2);
  EXPECT_EQ(s[0].diverged, 1);
  EXPECT_EQ(s[0].mean, 0.5);
}

TEST(Csv, RoundTripKeepsEveryField) {
  const std::vector<RunRecord> runs{record("GIR", 4, 0.1 + 0.2), record("GIR-A", 9, std::nan(""), true)};
  const std::string text = csv_of(runs);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "dataset,task,variant,seed,split_seed,metric_name,metric_value,epochs_run,wall_ms,status");
  std::istringstream in(text);
  const auto back = read_runs_csv(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].metric_value, 0.1 + 0.2);
  EXPECT_EQ(back[0].seed, 4u);
  EXPECT_TRUE(back[1].diverged);
  EXPECT_TRUE(std::isnan(back[1].metric_value));
  EXPECT_EQ(csv_of(back), text);
}

TEST(Csv, MalformedRowsRejected) {
  std::istringstream short_row("header\na,b,c\n");
  EXPECT_THROW(read_runs_csv(short_row), FormatError);
  std::istringstream bad_number("header\nd,nc,GIR,x,0,accuracy,0.5,1,1,ok\n");
  EXPECT_THROW(read_runs_csv(bad_number), FormatError);
}

TEST(MessageGraph, HeldOutPositivesLeaveBothDirections) {
  const Dataset data = make_desk_dataset("celegans-lp", 0);
  const SplitSpec split = split_dataset(data.task, 1);
  const Graph g = message_graph(data, split);
  for (const auto* part : {&split.validation, &split.test}) {
    for (int i : *part) {
      const LabeledPair& p = data.task.pairs[i];
      if (p.label != 1) continue;
      EXPECT_FALSE(g.has_edge(p.u, p.v));
      EXPECT_FALSE(g.has_edge(p.v, p.u));
    }
  }
  for (int i : split.train) {
    const LabeledPair& p = data.task.pairs[i];
    if (p.label == 1) EXPECT_TRUE(g.has_edge(p.u, p.v) && g.has_edge(p.v, p.u));
  }
}

ExperimentConfig tiny_sweep(int jobs) {
  auto c = ExperimentConfig::from_json_text(R"({"generator": "europe-nc", "variants": ["GCN", "GIR-A"],
      "seeds": [0, 1], "split_seeds": [0, 1], "train": {"epochs": 15, "patience": 15}})");
  c.jobs = jobs;
  return c;
}

TEST(Sweep, RerunsAndThreadCountsAgree) {
  const auto a = run_experiment(tiny_sweep(1));
  const auto b = run_experiment(tiny_sweep(1));
  const auto c = run_experiment(tiny_sweep(3));
  ASSERT_EQ(a.size(), 8u);
  EXPECT_EQ(without_wall_time(csv_of(a)), without_wall_time(csv_of(b)));
  EXPECT_EQ(without_wall_time(csv_of(a)), without_wall_time(csv_of(c)));
}

TEST(Sweep, SummaryMatchesRecomputationFromCsv) {
  const auto runs = run_experiment(tiny_sweep(1));
  std::istringstream in(csv_of(runs));
  std::map<std::string, std::vector<double>> by_variant;
  for (const RunRecord& r : read_runs_csv(in)) by_variant[r.variant].push_back(r.metric_value);
  for (const Summary& s : aggregate_runs(runs)) {
    const auto& v = by_variant.at(s.variant);
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    EXPECT_NEAR(s.mean, mean, 1e-15);
    EXPECT_EQ(s.runs, static_cast<int>(v.size()));
  }
}

// Pairs inside one mirror copy are positives; swapping the second endpoint
// for its mirror image gives the matching negative.
class MirrorPairs : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gir_mirror_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(dir_);
    const MirrorGraph m = make_mirror_graph(random_arm(14, 5));
    write_edge_list(dir_ / "edges.txt", m.graph);
    LabeledTask task;
    task.kind = TaskKind::kNodePairClassification;
    for (NodeId u = 0; u < m.arm_size; ++u) {
      for (NodeId w = u + 1; w < m.arm_size; ++w) {
        task.pairs.push_back({u, w, 1});
        task.pairs.push_back({u, m.pairing[w], 0});
        task.pairs.push_back({m.pairing[u], m.pairing[w], 1});
        task.pairs.push_back({m.pairing[u], w, 0});
      }
    }
    write_label_file(dir_ / "pairs.txt", task);
  }
  void TearDown() override { fs::remove_all(dir_); }

  double mean_auc(const std::string& variant) {
    auto c = ExperimentConfig::from_json_text(R"({"edge_list": "edges.txt", "labels": "pairs.txt", "task": "npc",
        "variants": [")" + variant + R"("], "model": {"hidden": 16}, "anchors": {"count": 1},
        "seeds": [0, 1, 2], "split_seeds": [0, 1], "train": {"epochs": 150, "patience": 150}})",
                                              dir_);
    double sum = 0.0;
    const auto runs = run_experiment(c);
    for (const RunRecord& r : runs) sum += r.metric_value;
    return sum / static_cast<double>(runs.size());
  }

  fs::path dir_;
};

TEST_F(MirrorPairs, GcnCannotTellMirrorImagesApart) {
  const double auc = mean_auc("GCN");
  EXPECT_NEAR(auc, 0.5, 0.05);
}

TEST_F(MirrorPairs, OneSidedAnchorSeparatesThem) { EXPECT_GE(mean_auc("GIR-A"), 0.9); }

TEST(FusionConfig, ParsesAndValidatesPresets) {
  const auto c = FusionExperimentConfig::from_json_text(
      R"({"presets": ["GCN-GIR", "GCN-GIR-JA"], "seeds": [3], "stage2": {"epochs": 7}})");
  EXPECT_EQ(c.presets.size(), 2u);
  EXPECT_EQ(c.stage2.epochs, 7);
  EXPECT_THROW(FusionExperimentConfig::from_json_text(R"({"presets": ["nope"]})"), FormatError);
}

TEST(Predictions, ReadsLabelAndExpertColumns) {
  std::istringstream in("label,gcn,gir\n1,1,0\n0,1,0\n");
  const PredictionTable t = read_prediction_csv(in);
  EXPECT_EQ(t.experts, (std::vector<std::string>{"gcn", "gir"}));
  EXPECT_EQ(t.labels, (std::vector<int>{1, 0}));
  EXPECT_EQ(t.predictions[0], (std::vector<int>{1, 1}));
  std::istringstream bad("gcn,gir\n1,0\n");
  EXPECT_THROW(read_prediction_csv(bad), FormatError);
}

}  // namespace
}  // namespace gir
