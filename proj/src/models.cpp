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

#include "gir/models.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "gir/error.hpp"
#include "gir/metrics.hpp"
#include "gir/adam.hpp"

namespace gir {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kGcn: return "GCN";
    case Variant::kGcnA: return "GCN-A";
    case Variant::kGcnO: return "GCN-O";
    case Variant::kGir: return "GIR";
    case Variant::kGirA: return "GIR-A";
    case Variant::kGirO: return "GIR-O";
    case Variant::kGirMix: return "GIR-MIX";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  static const std::map<std::string, Variant> kByName = {
      {"GCN", Variant::kGcn}, {"GCN-A", Variant::kGcnA}, {"GCN-O", Variant::kGcnO},     {"GIR", Variant::kGir},
      {"GIR-A", Variant::kGirA}, {"GIR-O", Variant::kGirO}, {"GIR-MIX", Variant::kGirMix},
  };
  const auto it = kByName.find(name);
  if (it == kByName.end()) throw FormatError("unknown model variant '" + name + "'");
  return it->second;
}

bool uses_schedule(Variant v) {
  return v == Variant::kGir || v == Variant::kGirA || v == Variant::kGirO || v == Variant::kGirMix;
}

FeatureMode feature_mode(Variant v) {
  switch (v) {
    case Variant::kGcnA:
    case Variant::kGirA: return FeatureMode::kAnchorOneHot;
    case Variant::kGcnO:
    case Variant::kGirO: return FeatureMode::kNodeOneHot;
    default: return FeatureMode::kNone;
  }
}

NodeFeatures augment_features(const NodeFeatures& x, FeatureMode mode, const AnchorSet* anchors) {
  if (mode == FeatureMode::kNone) return x;
  int extra = x.rows;
  if (mode == FeatureMode::kAnchorOneHot) {
    detail::require(anchors != nullptr, "anchor-onehot augmentation needs anchors");
    extra = static_cast<int>(anchors->size());
  }
  NodeFeatures out;
  out.rows = x.rows;
  out.dim = x.dim + extra;
  out.placeholder = false;
  out.values.assign(static_cast<std::size_t>(out.rows) * out.dim, 0.0);
  for (int r = 0; r < x.rows; ++r)
    for (int c = 0; c < x.dim; ++c) out.values[static_cast<std::size_t>(r) * out.dim + c] = x.at(r, c);
  if (mode == FeatureMode::kNodeOneHot) {
    for (int r = 0; r < x.rows; ++r) out.values[static_cast<std::size_t>(r) * out.dim + x.dim + r] = 1.0;
  } else {
    for (std::size_t k = 0; k < anchors->size(); ++k) {
      const NodeId a = anchors->nodes[k];
      detail::require(a >= 0 && a < x.rows, "anchor id out of range");
      out.values[static_cast<std::size_t>(a) * out.dim + x.dim + k] = 1.0;
    }
  }
  return out;
}

void ModelConfig::validate() const {
  detail::require(layers >= 1, "model needs at least one layer");
  detail::require(hidden >= 1 && out_dim >= 1, "layer widths must be positive");
  if (variant == Variant::kGirMix) {
    detail::require(anchor_sets >= 1, "GIR-MIX needs at least one anchor set");
    detail::require(hidden % anchor_sets == 0, "GIR-MIX hidden width must be divisible by the anchor set count");
    detail::require(out_dim >= anchor_sets, "GIR-MIX output width must be at least the anchor set count");
  }
}

namespace {

int set_count(const ModelConfig& c) { return c.variant == Variant::kGirMix ? c.anchor_sets : 1; }

/// Width of block `b` when `width` is split over `k` blocks; earlier blocks
/// absorb the remainder.
int block_width(int width, int k, int b) { return width / k + (b < width % k ? 1 : 0); }

}  // namespace

std::vector<nd::Parameter*> ModelParams::flat() {
  std::vector<nd::Parameter*> out;
  for (auto& layer : layers) {
    for (auto& block : layer) {
      out.push_back(&block.weight);
      out.push_back(&block.bias);
    }
  }
  return out;
}

std::vector<nd::Parameter> ModelParams::flat_copy() const {
  std::vector<nd::Parameter> out;
  for (const auto& layer : layers) {
    for (const auto& block : layer) {
      out.push_back(block.weight);
      out.push_back(block.bias);
    }
  }
  return out;
}

void ModelParams::assign(std::span<const nd::Parameter> values) {
  std::map<std::string, const nd::Parameter*> by_name;
  for (const auto& p : values) by_name[p.name] = &p;
  for (nd::Parameter* p : flat()) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw FormatError("checkpoint is missing parameter '" + p->name + "'");
    if (!it->second->value.same_shape(p->value)) throw FormatError("shape mismatch for parameter '" + p->name + "'");
    p->value = it->second->value;
  }
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  const auto fa = a.flat_copy();
  const auto fb = b.flat_copy();
  if (fa.size() != fb.size()) return false;
  for (std::size_t i = 0; i < fa.size(); ++i) {
    if (fa[i].name != fb[i].name || !(fa[i].value == fb[i].value)) return false;
  }
  return true;
}

ModelInputs ModelInputs::prepare(const ModelConfig& config, const Graph& g, const NodeFeatures& base,
                                 const AnchorSet& anchors) {
  config.validate();
  detail::require(base.rows == g.node_count(), "feature rows must equal node count");
  ModelInputs in;
  in.node_count = g.node_count();
  in.anchors = anchors;
  const FeatureMode mode = feature_mode(config.variant);
  const NodeFeatures x = augment_features(base, mode, mode == FeatureMode::kAnchorOneHot ? &anchors : nullptr);
  in.features = nd::Tensor(x.rows, x.dim, x.values);

  if (uses_schedule(config.variant)) {
    detail::require(anchors.size() > 0, "GIR variants need a nonempty anchor set");
    if (config.variant == Variant::kGirMix && config.anchor_sets > 1) {
      for (const AnchorSet& s : partition_anchors(anchors, config.anchor_sets).sets) {
        in.schedules.push_back(Schedule::build(g, s.nodes, config.layers, config.mode));
      }
    } else {
      in.schedules.push_back(Schedule::build(g, anchors.nodes, config.layers, config.mode));
    }
  } else {
    in.gcn_groups.resize(static_cast<std::size_t>(g.node_count()));
    for (NodeId v = 0; v < g.node_count(); ++v) {
      auto& grp = in.gcn_groups[v];
      const auto nbrs = g.in_neighbors(v);
      grp.assign(nbrs.begin(), nbrs.end());
      grp.push_back(v);
    }
  }
  return in;
}

ModelParams init_params(const ModelConfig& config, int input_dim, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const int k = set_count(config);
  const bool gir = uses_schedule(config.variant);
  ModelParams params;
  int in_width = input_dim;
  for (int l = 1; l <= config.layers; ++l) {
    const int out_width = l == config.layers ? config.out_dim : config.hidden;
    const int fan_in = gir ? 2 * in_width : in_width;
    std::vector<DenseBlock> blocks;
    for (int b = 0; b < k; ++b) {
      const int w = block_width(out_width, k, b);
      const std::string prefix = "layer" + std::to_string(l) + ".block" + std::to_string(b);
      blocks.push_back(DenseBlock{{prefix + ".weight", nd::glorot_uniform(fan_in, w, rng)},
                                  {prefix + ".bias", nd::Tensor(1, w)}});
    }
    params.layers.push_back(std::move(blocks));
    in_width = out_width;
  }
  return params;
}

nd::Var gcn_layer(nd::Tape& t, nd::Var h, const std::vector<std::vector<int>>& groups, nd::Var w, nd::Var b,
                  bool apply_relu) {
  nd::Var out = nd::affine(t, nd::grouped_mean(t, h, groups), w, b);
  return apply_relu ? nd::relu(t, out) : out;
}

nd::Var sage_gir_layer(nd::Tape& t, nd::Var h, const std::vector<std::vector<int>>& active_in, nd::Var w,
                       nd::Var b, bool apply_relu) {
  nd::Var message = nd::grouped_mean(t, h, active_in);
  nd::Var out = nd::affine(t, nd::concat_cols(t, h, message), w, b);
  return apply_relu ? nd::relu(t, out) : out;
}

nd::Var forward(nd::Tape& t, const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs,
                std::vector<nd::Var>* param_vars, bool trainable) {
  const int k = set_count(config);
  detail::require(static_cast<int>(params.layers.size()) == config.layers, "parameter layer count mismatch");
  const bool gir = uses_schedule(config.variant);
  if (gir) {
    detail::require(static_cast<int>(inputs.schedules.size()) == k, "schedule count does not match anchor sets");
    for (const Schedule& s : inputs.schedules) {
      detail::require(s.layers() == config.layers, "schedule layer count does not match model layers");
    }
  }
  auto bind = [&](const nd::Parameter& p) {
    nd::Var v = trainable ? t.parameter(p) : t.constant(p.value);
    if (param_vars) param_vars->push_back(v);
    return v;
  };

  nd::Var h = t.constant(inputs.features);
  for (int l = 1; l <= config.layers; ++l) {
    const auto& blocks = params.layers[l - 1];
    detail::require(static_cast<int>(blocks.size()) == k, "parameter block count mismatch");
    const bool last = l == config.layers;
    std::vector<nd::Var> outs;
    for (int b = 0; b < k; ++b) {
      nd::Var w = bind(blocks[b].weight);
      nd::Var bias = bind(blocks[b].bias);
      outs.push_back(gir ? sage_gir_layer(t, h, inputs.schedules[b].active_in(l), w, bias, !last)
                         : gcn_layer(t, h, inputs.gcn_groups, w, bias, !last));
    }
    h = k == 1 ? outs[0] : nd::concat_cols(t, outs);
  }
  return h;
}

nd::Tensor embed(const ModelConfig& config, const ModelParams& params, const ModelInputs& inputs) {
  nd::Tape t;
  return t.value(forward(t, config, params, inputs, nullptr, /*trainable=*/false));
}

double pair_score(std::span<const double> zu, std::span<const double> zv) {
  detail::require(zu.size() == zv.size(), "pair_score: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < zu.size(); ++i) acc += zu[i] * zv[i];
  return acc;
}

nd::Var task_loss(nd::Tape& t, nd::Var z, const LabeledTask& task, std::span<const int> items) {
  if (!task.is_pair_task()) {
    std::vector<int> labels;
    labels.reserve(items.size());
    for (int v : items) labels.push_back(task.node_labels.at(v));
    return nd::cross_entropy(t, nd::gather_rows(t, z, items), labels);
  }
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> labels;
  for (int i : items) {
    const LabeledPair& p = task.pairs.at(i);
    pairs.emplace_back(p.u, p.v);
    labels.push_back(p.label);
  }
  return nd::bce_with_logits(t, nd::pair_dot(t, z, pairs), labels);
}

double task_metric(const nd::Tensor& z, const LabeledTask& task, std::span<const int> items) {
  if (!task.is_pair_task()) {
    std::vector<int> pred, labels;
    for (int v : items) {
      int best = 0;
      for (int c = 1; c < z.cols; ++c) {
        if (z(v, c) > z(v, best)) best = c;
      }
      pred.push_back(best);
      labels.push_back(task.node_labels.at(v));
    }
    return accuracy(pred, labels);
  }
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i : items) {
    const LabeledPair& p = task.pairs.at(i);
    scores.push_back(pair_score({&z.data[static_cast<std::size_t>(p.u) * z.cols], static_cast<std::size_t>(z.cols)},
                                {&z.data[static_cast<std::size_t>(p.v) * z.cols], static_cast<std::size_t>(z.cols)}));
    labels.push_back(p.label);
  }
  return roc_auc(scores, labels);
}

double task_loss_value(const nd::Tensor& z, const LabeledTask& task, std::span<const int> items) {
  nd::Tape t;
  return t.value(task_loss(t, t.constant(z), task, items)).item();
}

TrainResult train_model(const ModelConfig& config, const ModelInputs& inputs, const LabeledTask& task,
                        const SplitSpec& split, const TrainHyper& hyper) {
  detail::require(!split.train.empty() && !split.validation.empty(), "training needs train and validation items");
  ModelParams params = init_params(config, inputs.features.cols, hyper.seed);
  nd::Adam adam({hyper.learning_rate, hyper.weight_decay});

  TrainResult result;
  result.best_val = -1.0;
  double best_loss = 0.0;
  int since_best = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    nd::Tape tape;
    std::vector<nd::Var> vars;
    const nd::Var z = forward(tape, config, params, inputs, &vars);
    nd::Var loss;
    try {
      loss = task_loss(tape, z, task, split.train);
    } catch (const NonFiniteError& e) {
      throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const double loss_value = tape.value(loss).item();
    const double val = task_metric(tape.value(z), task, split.validation);
    const double val_loss = task_loss_value(tape.value(z), task, split.validation);
    result.trace.push_back({epoch, loss_value, val, val_loss});
    if (val > result.best_val || (val == result.best_val && val_loss < best_loss)) {
      result.best_val = val;
      best_loss = val_loss;
      result.best_epoch = epoch;
      result.params = params;
      result.test_metric = split.test.empty() ? 0.0 : task_metric(tape.value(z), task, split.test);
      since_best = 0;
    } else if (++since_best >= hyper.patience) {
      break;
    }
    tape.backward(loss);
    std::vector<nd::Tensor> grads;
    grads.reserve(vars.size());
    for (nd::Var v : vars) grads.push_back(tape.grad(v));
    const auto flat = params.flat();
    adam.step(flat, grads);
    for (const nd::Parameter* p : flat) {
      if (!p->value.all_finite()) throw TrainingDiverged("parameter '" + p->name + "' became non-finite");
    }
  }
  return result;
}

void write_embeddings_csv(const std::filesystem::path& path, const nd::Tensor& z) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write embeddings: " + path.string());
  out.precision(17);
  for (int r = 0; r < z.rows; ++r) {
    out << r;
    for (int c = 0; c < z.cols; ++c) out << ',' << z(r, c);
    out << '\n';
  }
}

}  // namespace gir
