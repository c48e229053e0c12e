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

#include "gir/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "gir/error.hpp"
#include "gir/random.hpp"

namespace gir {

using nlohmann::json;

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("config field '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<std::uint64_t> seed_list(const json& j, const char* key, std::vector<std::uint64_t> fallback) {
  return get_or<std::vector<std::uint64_t>>(j, key, std::move(fallback));
}

std::vector<std::uint64_t> iota_seeds(int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(static_cast<std::uint64_t>(i));
  return out;
}

TrainHyper parse_hyper(const json& j, TrainHyper h) {
  h.learning_rate = get_or(j, "learning_rate", h.learning_rate);
  h.weight_decay = get_or(j, "weight_decay", h.weight_decay);
  h.epochs = get_or(j, "epochs", h.epochs);
  h.patience = get_or(j, "patience", h.patience);
  return h;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text, const std::filesystem::path& base_dir) {
  const json j = parse(text);
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  ExperimentConfig c;
  c.generator = get_or<std::string>(j, "generator", "");
  c.dataset = get_or<std::string>(j, "dataset", c.generator);
  c.edge_list = resolve(base_dir, get_or<std::string>(j, "edge_list", ""));
  c.label_file = resolve(base_dir, get_or<std::string>(j, "labels", ""));
  c.bidirected = get_or(j, "bidirected", true);
  c.data_seed = get_or<std::uint64_t>(j, "data_seed", 0);

  if (!c.generator.empty()) {
    const DeskPreset& p = desk_preset(c.generator);
    const std::string suffix = c.generator.substr(c.generator.rfind('-') + 1);
    c.task = parse_task_kind(suffix);
    c.model.hidden = p.hidden;
    c.model.out_dim = p.hidden;
    c.model.anchor_sets = p.anchor_sets;
    c.anchor_count = p.anchors;
  }
  if (j.contains("task")) c.task = parse_task_kind(get_or<std::string>(j, "task", ""));

  for (const auto& name : get_or<std::vector<std::string>>(j, "variants", {"GCN", "GIR", "GIR-A"})) {
    c.variants.push_back(parse_variant(name));
  }
  if (j.contains("model")) {
    const json& m = j.at("model");
    c.model.layers = get_or(m, "layers", c.model.layers);
    c.model.hidden = get_or(m, "hidden", c.model.hidden);
    c.model.out_dim = get_or(m, "out_dim", c.model.hidden);
    c.model.anchor_sets = get_or(m, "anchor_sets", c.model.anchor_sets);
    c.model.mode = parse_schedule_mode(get_or<std::string>(m, "mode", schedule_mode_name(c.model.mode)));
  }
  if (j.contains("anchors")) {
    const json& a = j.at("anchors");
    c.anchor_count = get_or(a, "count", c.anchor_count);
    c.anchor_strategy =
        parse_anchor_strategy(get_or<std::string>(a, "strategy", anchor_strategy_name(c.anchor_strategy)));
  }
  if (j.contains("train")) c.hyper = parse_hyper(j.at("train"), c.hyper);

  // "full": 20 seeds x 5 splits; "desk": 5 seeds x 3 splits.
  const std::string protocol = get_or<std::string>(j, "protocol", "full");
  if (protocol != "full" && protocol != "desk") throw FormatError("protocol must be 'full' or 'desk'");
  const bool desk = protocol == "desk";
  c.seeds = seed_list(j, "seeds", iota_seeds(desk ? 5 : 20));
  c.split_seeds = seed_list(j, "split_seeds", iota_seeds(desk ? 3 : 5));
  c.output = resolve(base_dir, get_or<std::string>(j, "output", ""));
  c.jobs = get_or(j, "jobs", 1);
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_json_text(read_text(path), path.parent_path());
}

void ExperimentConfig::validate() const {
  detail::require(!seeds.empty(), "seed list must be nonempty");
  detail::require(!split_seeds.empty(), "split seed list must be nonempty");
  detail::require(!variants.empty(), "variant list must be nonempty");
  detail::require(jobs >= 1, "jobs must be at least 1");
  detail::require(anchor_count >= 1, "anchor count must be positive");
  if (generator.empty()) {
    detail::require(!edge_list.empty() && !label_file.empty(),
                    "config needs either a generator or both edge_list and labels");
    detail::require(std::filesystem::exists(edge_list), "edge list not found: " + edge_list.string());
    detail::require(std::filesystem::exists(label_file), "label file not found: " + label_file.string());
  }
}

Dataset load_dataset(const ExperimentConfig& config) {
  if (!config.generator.empty()) {
    Dataset d = make_desk_dataset(config.generator, config.data_seed);
    if (!config.dataset.empty()) d.name = config.dataset;
    return d;
  }
  const EdgeList el = read_edge_list(config.edge_list);
  Dataset d;
  d.name = config.dataset.empty() ? config.edge_list.stem().string() : config.dataset;
  d.graph = Graph::build(el.edges, el.node_count, config.bidirected);
  d.features = NodeFeatures::ones(el.node_count);
  d.task = read_label_file(config.label_file, config.task, el.node_count);
  return d;
}

Graph message_graph(const Dataset& data, const SplitSpec& split) {
  if (data.task.kind != TaskKind::kLinkPrediction) return data.graph;
  std::set<Edge> held_out;
  for (const auto* part : {&split.validation, &split.test}) {
    for (int i : *part) {
      const LabeledPair& p = data.task.pairs.at(static_cast<std::size_t>(i));
      if (p.label != 1) continue;
      held_out.insert({p.u, p.v});
      held_out.insert({p.v, p.u});
    }
  }
  std::vector<Edge> kept;
  for (const Edge& e : data.graph.edges()) {
    if (!held_out.count(e)) kept.push_back(e);
  }
  return Graph::build(kept, data.graph.node_count(), false);
}

namespace {

auto record_key(const RunRecord& r) {
  return std::tie(r.dataset, r.task, r.variant, r.split_seed, r.seed, r.metric_name);
}

struct Job {
  std::size_t split_index;
  std::size_t variant_index;
  std::uint64_t seed;
};

// Runs `count` independent jobs on up to `jobs` threads. Each job writes its
// own slot, so completion order does not matter.
template <typename Fn>
void run_parallel(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  data.task.validate(data.graph.node_count());
  const std::string metric = data.task.is_pair_task() ? "roc_auc" : "accuracy";

  struct SplitContext {
    SplitSpec split;
    Graph graph;
    AnchorSet anchors;
  };
  std::vector<SplitContext> splits;
  for (std::uint64_t s : config.split_seeds) {
    SplitContext ctx;
    ctx.split = split_dataset(data.task, s);
    ctx.graph = message_graph(data, ctx.split);
    const int m = std::min(config.anchor_count, ctx.graph.node_count());
    ctx.anchors = select_anchors(ctx.graph, m, config.anchor_strategy, s);
    splits.push_back(std::move(ctx));
  }

  std::vector<ModelConfig> models;
  for (Variant v : config.variants) {
    ModelConfig mc = config.model;
    mc.variant = v;
    if (!data.task.is_pair_task()) mc.out_dim = data.task.class_count();
    if (v != Variant::kGirMix) mc.anchor_sets = 1;
    mc.validate();
    models.push_back(mc);
  }

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < splits.size(); ++s)
    for (std::size_t v = 0; v < models.size(); ++v)
      for (std::uint64_t seed : config.seeds) jobs.push_back({s, v, seed});

  // Inputs are shared read-only across model seeds.
  std::vector<std::vector<ModelInputs>> inputs(splits.size());
  for (std::size_t s = 0; s < splits.size(); ++s)
    for (const ModelConfig& mc : models)
      inputs[s].push_back(ModelInputs::prepare(mc, splits[s].graph, data.features, splits[s].anchors));

  std::vector<RunRecord> records(jobs.size());
  run_parallel(jobs.size(), config.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    const ModelConfig& mc = models[job.variant_index];
    RunRecord& r = records[i];
    r.dataset = data.name;
    r.task = task_kind_name(data.task.kind);
    r.variant = variant_name(mc.variant);
    r.seed = job.seed;
    r.split_seed = config.split_seeds[job.split_index];
    r.metric_name = metric;
    TrainHyper h = config.hyper;
    h.seed = mix_seed(job.seed, r.split_seed);
    const auto start = std::chrono::steady_clock::now();
    try {
      const TrainResult tr =
          train_model(mc, inputs[job.split_index][job.variant_index], data.task, splits[job.split_index].split, h);
      r.metric_value = tr.test_metric;
      r.epochs_run = static_cast<int>(tr.trace.size());
    } catch (const TrainingDiverged&) {
      r.diverged = true;
      r.metric_value = std::numeric_limits<double>::quiet_NaN();
    }
    r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  });

  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) { return record_key(a) < record_key(b); });
  return records;
}

std::vector<Summary> aggregate_runs(std::span<const RunRecord> runs) {
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : runs) groups[{r.dataset, r.task, r.variant, r.metric_name}].push_back(&r);
  std::vector<Summary> out;
  for (const auto& [key, rows] : groups) {
    Summary s;
    std::tie(s.dataset, s.task, s.variant, s.metric_name) = key;
    s.runs = static_cast<int>(rows.size());
    std::vector<double> values;
    for (const RunRecord* r : rows) {
      if (r->diverged) {
        ++s.diverged;
      } else {
        values.push_back(r->metric_value);
      }
    }
    if (values.empty()) {
      s.mean = s.stddev = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(values.size());
      double sq = 0.0;
      for (double v : values) sq += (v - s.mean) * (v - s.mean);
      s.stddev = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
      s.min = *std::min_element(values.begin(), values.end());
      s.max = *std::max_element(values.begin(), values.end());
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> runs) {
  out << "dataset,task,variant,seed,split_seed,metric_name,metric_value,epochs_run,wall_ms,status\n";
  for (const RunRecord& r : runs) {
    out << r.dataset << ',' << r.task << ',' << r.variant << ',' << r.seed << ',' << r.split_seed << ','
        << r.metric_name << ',' << format_double(r.metric_value) << ',' << r.epochs_run << ',' << r.wall_ms << ','
        << (r.diverged ? "diverged" : "ok") << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("runs CSV is empty");
  std::vector<RunRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) throw FormatError("runs CSV line " + std::to_string(line_no) + ": expected 10 fields");
    RunRecord r;
    try {
      r.dataset = f[0];
      r.task = f[1];
      r.variant = f[2];
      r.seed = std::stoull(f[3]);
      r.split_seed = std::stoull(f[4]);
      r.metric_name = f[5];
      r.metric_value = f[6] == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(f[6]);
      r.epochs_run = std::stoi(f[7]);
      r.wall_ms = std::stoll(f[8]);
      r.diverged = f[9] == "diverged";
    } catch (const std::logic_error&) {
      throw FormatError("runs CSV line " + std::to_string(line_no) + ": malformed number");
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& out, std::span<const Summary> rows) {
  out << "dataset,task,variant,metric_name,runs,diverged,mean,std,min,max\n";
  for (const Summary& s : rows) {
    out << s.dataset << ',' << s.task << ',' << s.variant << ',' << s.metric_name << ',' << s.runs << ','
        << s.diverged << ',' << format_double(s.mean) << ',' << format_double(s.stddev) << ','
        << format_double(s.min) << ',' << format_double(s.max) << '\n';
  }
}

FusionExperimentConfig FusionExperimentConfig::from_json_text(const std::string& text,
                                                               const std::filesystem::path& base_dir) {
  const json j = parse(text);
  if (!j.is_object()) throw FormatError("config must be a JSON object");
  FusionExperimentConfig c;
  c.hubs_per_side = get_or(j, "hubs_per_side", c.hubs_per_side);
  c.data_seed = get_or(j, "data_seed", c.data_seed);
  c.split_seed = get_or(j, "split_seed", c.split_seed);
  c.presets = get_or(j, "presets", c.presets);
  c.seeds = seed_list(j, "seeds", c.seeds);
  c.layers = get_or(j, "layers", c.layers);
  c.hidden = get_or(j, "hidden", c.hidden);
  c.mode = parse_schedule_mode(get_or<std::string>(j, "mode", schedule_mode_name(c.mode)));
  c.fwr_coefficient = get_or(j, "fwr_coefficient", c.fwr_coefficient);
  c.temperature = get_or(j, "temperature", c.temperature);
  c.expert_lr_scale = get_or(j, "expert_lr_scale", c.expert_lr_scale);
  if (j.contains("stage1")) c.stage1 = parse_hyper(j.at("stage1"), c.stage1);
  if (j.contains("stage2")) c.stage2 = parse_hyper(j.at("stage2"), c.stage2);
  c.output = resolve(base_dir, get_or<std::string>(j, "output", ""));
  detail::require(!c.seeds.empty(), "seed list must be nonempty");
  detail::require(!c.presets.empty(), "preset list must be nonempty");
  for (const auto& p : c.presets) fusion_preset(p);
  return c;
}

FusionExperimentConfig FusionExperimentConfig::load(const std::filesystem::path& path) {
  return from_json_text(read_text(path), path.parent_path());
}

std::vector<FusionRun> run_fusion_experiment(const FusionExperimentConfig& config) {
  const TwoViewFixture fx = make_two_view_fixture(config.hubs_per_side, config.data_seed);
  const SplitSpec split = split_dataset(fx.data.task, config.split_seed);
  const int classes = fx.data.task.class_count();

  ModelConfig gcn;
  gcn.variant = Variant::kGcn;
  ModelConfig gir;
  gir.variant = Variant::kGir;
  for (ModelConfig* mc : {&gcn, &gir}) {
    mc->layers = config.layers;
    mc->hidden = config.hidden;
    mc->out_dim = classes;
    mc->mode = config.mode;
  }
  const ModelInputs gcn_in = ModelInputs::prepare(gcn, fx.data.graph, fx.attribute_view, fx.anchors);
  const ModelInputs gir_in = ModelInputs::prepare(gir, fx.data.graph, fx.structure_view, fx.anchors);
  const Expert experts[] = {{gcn, &gcn_in}, {gir, &gir_in}};

  std::vector<FusionRun> runs;
  for (const std::string& preset : config.presets) {
    for (std::uint64_t seed : config.seeds) {
      FusionOptions o = fusion_preset(preset);
      o.stage1 = config.stage1;
      o.stage2 = config.stage2;
      o.fwr_coefficient = config.fwr_coefficient;
      o.temperature = config.temperature;
      o.expert_lr_scale = config.expert_lr_scale;
      o.stage1.seed = mix_seed(seed, 1);
      o.stage2.seed = mix_seed(seed, 2);
      runs.push_back({preset, seed, train_fusion(experts, fx.data.task, split, o)});
    }
  }
  return runs;
}

std::vector<RunRecord> fusion_records(std::span<const FusionRun> runs) {
  std::vector<RunRecord> out;
  for (const FusionRun& run : runs) {
    auto add = [&](const std::string& metric, double value) {
      RunRecord r;
      r.dataset = "two-view";
      r.task = "nc";
      r.variant = run.preset;
      r.seed = run.seed;
      r.metric_name = metric;
      r.metric_value = value;
      r.epochs_run = run.result.epochs_run;
      out.push_back(std::move(r));
    };
    add("fused_accuracy", run.result.fused_test_acc);
    for (std::size_t i = 0; i < run.result.expert_test_acc.size(); ++i) {
      add("expert" + std::to_string(i) + "_accuracy", run.result.expert_test_acc[i]);
    }
    add("ec", run.result.ec.aggregate);
  }
  std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) { return record_key(a) < record_key(b); });
  return out;
}

PredictionTable read_prediction_csv(std::istream& in) {
  PredictionTable t;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("prediction CSV is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) header.push_back(cell);
  }
  if (header.size() < 3 || header[0] != "label") {
    throw FormatError("prediction CSV header must be 'label,<expert>,<expert>[,...]'");
  }
  t.experts.assign(header.begin() + 1, header.end());
  t.predictions.resize(t.experts.size());
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<int> row;
    try {
      for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stoi(cell));
    } catch (const std::logic_error&) {
      throw FormatError("prediction CSV line " + std::to_string(line_no) + ": not an integer");
    }
    if (row.size() != header.size()) {
      throw FormatError("prediction CSV line " + std::to_string(line_no) + ": wrong field count");
    }
    t.labels.push_back(row[0]);
    for (std::size_t e = 0; e < t.experts.size(); ++e) t.predictions[e].push_back(row[e + 1]);
  }
  return t;
}

}  // namespace gir
