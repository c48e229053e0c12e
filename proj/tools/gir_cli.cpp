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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gir/anchors.hpp"
#include "gir/certify.hpp"
#include "gir/error.hpp"
#include "gir/fusion.hpp"
#include "gir/generators.hpp"
#include "gir/harness.hpp"

namespace {

// Failures print exactly one JSON line on stderr.
int report_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << '\n';
  return 1;
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw gir::FormatError("cannot write " + path);
    stream = &file;
  }
};

struct CertifyArgs {
  std::string edges;
  bool directed = false;
  int nodes = 100;
  double degree = 3.0;
  int anchors = 4;
  std::string strategy = "greedy-cover";
  int layers = 0;
  std::string check = "both";
  std::optional<std::string> mode;
};

int run_certify(const CertifyArgs& a, std::uint64_t seed, const std::string& out_path) {
  gir::Graph g;
  if (a.edges.empty()) {
    g = gir::random_digraph(a.nodes, a.degree, seed);
  } else {
    const gir::EdgeList el = gir::read_edge_list(a.edges);
    g = gir::Graph::build(el.edges, el.node_count, !a.directed);
  }
  const gir::AnchorSet anchors =
      gir::select_anchors(g, std::min(a.anchors, g.node_count()), gir::parse_anchor_strategy(a.strategy), seed);
  const int layers = a.layers > 0 ? a.layers : g.node_count();
  Output out(out_path);
  bool ok = true;
  if (a.check == "set" || a.check == "both") {
    const auto mode = a.mode ? gir::parse_schedule_mode(*a.mode) : gir::ScheduleMode::kBfsShell;
    const auto cert = gir::certify_set_distance(g, anchors.nodes, layers, mode);
    *out.stream << gir::format_report(cert);
    ok = ok && cert.passed();
  }
  if (a.check == "anchor" || a.check == "both") {
    const auto mode = a.mode ? gir::parse_schedule_mode(*a.mode) : gir::ScheduleMode::kLiteral;
    const auto cert = gir::certify_anchor_distances(g, anchors.nodes, layers, mode);
    *out.stream << gir::format_report(cert);
    ok = ok && cert.passed();
  }
  if (!ok) return report_error("certification_failed", "decoded distances differ from BFS");
  return 0;
}

gir::ExperimentConfig load_experiment(const std::string& path, const std::optional<std::string>& mode) {
  if (path.empty()) throw gir::InvalidArgument("--config is required");
  gir::ExperimentConfig c = gir::ExperimentConfig::load(path);
  if (mode) c.model.mode = gir::parse_schedule_mode(*mode);
  return c;
}

void emit_runs(const gir::ExperimentConfig& c, const std::vector<gir::RunRecord>& runs, const std::string& out_path,
               const std::string& summary_path) {
  const std::string path = !out_path.empty() ? out_path : c.output.string();
  {
    Output out(path);
    gir::write_runs_csv(*out.stream, runs);
  }
  if (!summary_path.empty()) {
    Output out(summary_path);
    gir::write_summary_csv(*out.stream, gir::aggregate_runs(runs));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor-based graph embeddings: certification, training, sweeps and fusion"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--out", out_path, "output path (stdout when omitted)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--mode", mode, "schedule mode")->check(CLI::IsMember({"literal", "bfs-shell"}));
  };

  CertifyArgs cargs;
  auto* certify = app.add_subcommand("certify", "check the constructed distance decoders against BFS");
  common(certify);
  certify->add_option("--edges", cargs.edges, "edge list; a random digraph is generated when omitted");
  certify->add_flag("--directed", cargs.directed, "keep edge directions from the edge list");
  certify->add_option("--nodes", cargs.nodes, "random digraph size");
  certify->add_option("--degree", cargs.degree, "random digraph mean out-degree");
  certify->add_option("--anchors", cargs.anchors, "anchor count");
  certify->add_option("--strategy", cargs.strategy, "anchor strategy")
      ->check(CLI::IsMember({"greedy-cover", "top-degree", "random"}));
  certify->add_option("--layers", cargs.layers, "propagation depth (default: node count)");
  certify->add_option("--check", cargs.check, "which decoder")->check(CLI::IsMember({"set", "anchor", "both"}));

  auto* train = app.add_subcommand("train", "one model seed on the first split of a config");
  common(train);
  std::string summary_path;
  int jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "every seed x split x variant of a config");
  common(sweep);
  sweep->add_option("--summary", summary_path, "aggregate CSV path");
  sweep->add_option("--jobs", jobs, "parallel runs (default: config value)");

  auto* fuse = app.add_subcommand("fuse", "two-stage expert fusion on the two-view fixture");
  common(fuse);

  std::string predictions_path;
  auto* ec = app.add_subcommand("ec", "expert complementarity from a prediction CSV");
  common(ec);
  ec->add_option("--predictions", predictions_path, "CSV: label,<expert>,<expert>...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    if (certify->parsed()) return run_certify(cargs, seed.value_or(0), out_path);

    if (train->parsed() || sweep->parsed()) {
      gir::ExperimentConfig c = load_experiment(config_path, mode);
      if (train->parsed()) {
        c.seeds = {seed.value_or(c.seeds.front())};
        c.split_seeds = {c.split_seeds.front()};
      } else if (seed) {
        c.seeds = {*seed};
      }
      if (jobs > 0) c.jobs = jobs;
      emit_runs(c, gir::run_experiment(c), out_path, summary_path);
      return 0;
    }

    if (fuse->parsed()) {
      gir::FusionExperimentConfig c =
          config_path.empty() ? gir::FusionExperimentConfig{} : gir::FusionExperimentConfig::load(config_path);
      if (seed) c.seeds = {*seed};
      if (mode) c.mode = gir::parse_schedule_mode(*mode);
      const auto runs = gir::run_fusion_experiment(c);
      Output out(!out_path.empty() ? out_path : c.output.string());
      gir::write_runs_csv(*out.stream, gir::fusion_records(runs));
      return 0;
    }

    if (ec->parsed()) {
      const std::string path = !predictions_path.empty() ? predictions_path : config_path;
      if (path.empty()) throw gir::InvalidArgument("--predictions is required");
      std::ifstream in(path);
      if (!in) throw gir::FormatError("cannot open " + path);
      const gir::PredictionTable t = gir::read_prediction_csv(in);
      const gir::ECReport r = gir::expert_complementarity(t.predictions, t.labels);
      Output out(out_path);
      *out.stream << "expert,ec,false,others_true,corrected\n";
      for (std::size_t i = 0; i < t.experts.size(); ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.per_expert[i]);
        *out.stream << t.experts[i] << ',' << buf << ',' << r.false_count[i] << ',' << r.others_true_count[i] << ','
                    << r.corrected_count[i] << '\n';
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", r.aggregate);
      *out.stream << "mean," << buf << ",,,\n";
      return 0;
    }
  } catch (const gir::TrainingDiverged& e) {
    return report_error("training_diverged", e.what());
  } catch (const gir::FormatError& e) {
    return report_error("format", e.what());
  } catch (const gir::InvalidArgument& e) {
    return report_error("invalid_argument", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
