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

#include "gir/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "gir/adam.hpp"
#include "gir/error.hpp"
#include "gir/metrics.hpp"
#include "gir/random.hpp"

namespace gir {

GateParams GateParams::init(int experts, int classes, std::uint64_t seed) {
  detail::require(experts >= 2, "fusion needs at least two experts");
  detail::require(classes >= 1, "fusion needs at least one class");
  Rng rng(mix_seed(seed, 0x6a7e));
  GateParams g;
  g.weight = {"gate.weight", nd::glorot_uniform(experts * classes, experts, rng)};
  g.bias = {"gate.bias", nd::Tensor(1, experts)};
  return g;
}

bool operator==(const GateParams& a, const GateParams& b) {
  return a.weight.value == b.weight.value && a.bias.value == b.bias.value;
}

namespace {

void check_logits(std::span<const nd::Tensor> logits, int gate_experts) {
  detail::require(logits.size() >= 2, "fusion needs at least two experts");
  detail::require(static_cast<int>(logits.size()) == gate_experts, "gate width must equal the expert count");
  for (const auto& l : logits) {
    detail::require(l.same_shape(logits[0]), "expert logits must share one shape, got " + nd::shape_string(l) +
                                                 " and " + nd::shape_string(logits[0]));
  }
}

}  // namespace

FusedOutput gate_fuse(std::span<const nd::Tensor> expert_logits, const GateParams& gate) {
  check_logits(expert_logits, gate.expert_count());
  const int n = expert_logits[0].rows;
  const int c = expert_logits[0].cols;
  const int k = static_cast<int>(expert_logits.size());
  detail::require(gate.weight.value.rows == k * c, "gate input width must be experts x classes");
  nd::Tensor joined(n, k * c);
  for (int e = 0; e < k; ++e)
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < c; ++j) joined(r, e * c + j) = expert_logits[e](r, j);
  nd::Tensor gl = nd::matmul(joined, gate.weight.value);
  for (int r = 0; r < n; ++r)
    for (int e = 0; e < k; ++e) gl(r, e) += gate.bias.value(0, e);
  FusedOutput out{nd::Tensor(n, c), nd::softmax_rows(gl)};
  for (int e = 0; e < k; ++e)
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < c; ++j) out.logits(r, j) += out.weights(r, e) * expert_logits[e](r, j);
  return out;
}

nd::Var gate_weights(nd::Tape& t, std::span<const nd::Var> expert_logits, nd::Var w, nd::Var b, nd::Var* fused) {
  std::vector<nd::Tensor> shapes;
  for (nd::Var v : expert_logits) shapes.push_back(nd::Tensor(t.value(v).rows, t.value(v).cols));
  check_logits(shapes, t.value(w).cols);
  const nd::Var weights = nd::softmax_rows(t, nd::affine(t, nd::concat_cols(t, expert_logits), w, b));
  if (fused) *fused = nd::mix_experts(t, weights, expert_logits);
  return weights;
}

nd::Tensor fwr_target(const nd::Tensor& losses, double temperature) {
  detail::require(temperature > 0.0, "fusion temperature must be positive");
  nd::Tensor scaled = losses;
  for (double& x : scaled.data) x = -x / temperature;
  return nd::softmax_rows(scaled);
}

double fwr_penalty(const nd::Tensor& weights, const nd::Tensor& losses, double temperature) {
  detail::require(weights.same_shape(losses), "fwr_penalty: weights and losses differ in shape");
  nd::Tape t;
  const nd::Var w = t.constant(weights);
  return t.value(nd::soft_cross_entropy(t, w, fwr_target(losses, temperature))).item();
}

FusionOptions fusion_preset(const std::string& name) {
  FusionOptions o;
  if (name == "GCN-GIR") return o;
  if (name == "GCN-GIR-nf") {
    o.freeze = false;
  } else if (name == "GCN-GIR-nFWR") {
    o.use_fwr = false;
  } else if (name == "GCN-GIR-J" || name == "GCN-GIR-JA") {
    o.pretrain = false;
    o.freeze = false;
    o.use_fwr = false;
    o.expert_losses = name == "GCN-GIR-JA";
  } else {
    throw FormatError("unknown fusion preset '" + name + "'");
  }
  return o;
}

ECReport expert_complementarity(const std::vector<std::vector<int>>& predictions, std::span<const int> labels) {
  detail::require(predictions.size() >= 2, "complementarity needs at least two experts");
  for (const auto& p : predictions) {
    detail::require(p.size() == labels.size(), "prediction and label lengths differ");
  }
  const std::size_t k = predictions.size();
  ECReport r;
  for (std::size_t i = 0; i < k; ++i) {
    int wrong = 0, others = 0, both = 0;
    for (std::size_t item = 0; item < labels.size(); ++item) {
      const bool false_i = predictions[i][item] != labels[item];
      bool other_true = false;
      for (std::size_t j = 0; j < k && !other_true; ++j) {
        other_true = j != i && predictions[j][item] == labels[item];
      }
      wrong += false_i;
      others += other_true;
      both += false_i && other_true;
    }
    const double p = wrong == 0 ? 0.0 : static_cast<double>(both) / wrong;
    const double q = others == 0 ? 0.0 : static_cast<double>(both) / others;
    r.per_expert.push_back(p == 0.0 || q == 0.0 ? 0.0 : 2.0 * p * q / (p + q));
    r.false_count.push_back(wrong);
    r.others_true_count.push_back(others);
    r.corrected_count.push_back(both);
  }
  for (double v : r.per_expert) r.aggregate += v;
  r.aggregate /= static_cast<double>(k);
  return r;
}

namespace {

std::vector<int> predict(const nd::Tensor& logits, std::span<const int> items) {
  std::vector<int> out;
  out.reserve(items.size());
  for (int v : items) {
    int best = 0;
    for (int c = 1; c < logits.cols; ++c) {
      if (logits(v, c) > logits(v, best)) best = c;
    }
    out.push_back(best);
  }
  return out;
}

std::vector<int> labels_of(const LabeledTask& task, std::span<const int> items) {
  std::vector<int> out;
  for (int v : items) out.push_back(task.node_labels.at(v));
  return out;
}

}  // namespace

FusionResult train_fusion(std::span<const Expert> experts, const LabeledTask& task, const SplitSpec& split,
                          const FusionOptions& options) {
  detail::require(task.kind == TaskKind::kNodeClassification, "fusion supports node classification only");
  detail::require(experts.size() >= 2, "fusion needs at least two experts");
  detail::require(options.pretrain || !options.freeze, "joint training cannot freeze unpretrained experts");
  const int k = static_cast<int>(experts.size());
  const int classes = task.class_count();
  for (const Expert& e : experts) {
    detail::require(e.inputs != nullptr, "expert inputs missing");
    detail::require(e.config.out_dim == classes, "expert output width must equal the class count");
  }

  FusionResult result;
  std::vector<ModelParams> params;
  for (int i = 0; i < k; ++i) {
    const Expert& e = experts[static_cast<std::size_t>(i)];
    if (options.pretrain) {
      TrainHyper h = options.stage1;
      h.seed = mix_seed(options.stage1.seed, static_cast<std::uint64_t>(i));
      params.push_back(train_model(e.config, *e.inputs, task, split, h).params);
    } else {
      params.push_back(init_params(e.config, e.inputs->features.cols,
                                   mix_seed(options.stage1.seed, static_cast<std::uint64_t>(i))));
    }
  }
  if (options.pretrain) result.pretrained = params;

  const TrainHyper& h2 = options.stage2;
  GateParams gate = GateParams::init(k, classes, h2.seed);
  nd::Adam gate_adam({h2.learning_rate, h2.weight_decay});
  std::vector<nd::Adam> expert_adam(static_cast<std::size_t>(k),
                                    nd::Adam({h2.learning_rate * options.expert_lr_scale, h2.weight_decay}));
  const std::vector<int> train_labels = labels_of(task, split.train);
  const std::vector<int> val_labels = labels_of(task, split.validation);

  GateParams best_gate = gate;
  std::vector<ModelParams> best_params = params;
  double best_val = -1.0;
  double best_loss = 0.0;
  int since_best = 0;
  for (int epoch = 0; epoch < h2.epochs; ++epoch) {
    nd::Tape t;
    std::vector<nd::Var> logits;
    std::vector<std::vector<nd::Var>> vars(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const Expert& e = experts[static_cast<std::size_t>(i)];
      // Frozen experts are still registered as parameters so that the
      // zero-gradient property can be observed, not just assumed.
      nd::Var z = forward(t, e.config, params[i], *e.inputs, &vars[i], true);
      logits.push_back(options.freeze ? nd::stop_gradient(t, z) : z);
    }
    const nd::Var gw = t.parameter(gate.weight);
    const nd::Var gb = t.parameter(gate.bias);
    nd::Var fused;
    nd::Var weights;
    nd::Var loss;
    try {
      weights = gate_weights(t, logits, gw, gb, &fused);
      loss = nd::cross_entropy(t, nd::gather_rows(t, fused, split.train), train_labels);
      if (options.use_fwr) {
        nd::Tensor losses(static_cast<int>(split.train.size()), k);
        for (int i = 0; i < k; ++i) {
          nd::Tensor rows(static_cast<int>(split.train.size()), classes);
          const nd::Tensor& z = t.value(logits[i]);
          for (std::size_t r = 0; r < split.train.size(); ++r)
            for (int c = 0; c < classes; ++c) rows(static_cast<int>(r), c) = z(split.train[r], c);
          const std::vector<double> ce = nd::row_cross_entropy(rows, train_labels);
          for (std::size_t r = 0; r < ce.size(); ++r) losses(static_cast<int>(r), i) = ce[r];
        }
        const nd::Var pen = nd::soft_cross_entropy(t, nd::gather_rows(t, weights, split.train),
                                                   fwr_target(losses, options.temperature));
        loss = nd::add(t, loss, nd::scale(t, pen, options.fwr_coefficient));
      }
      if (options.expert_losses) {
        for (int i = 0; i < k; ++i) {
          loss = nd::add(t, loss, nd::cross_entropy(t, nd::gather_rows(t, logits[i], split.train), train_labels));
        }
      }
    } catch (const NonFiniteError& err) {
      throw TrainingDiverged("fusion loss became non-finite at epoch " + std::to_string(epoch) + ": " + err.what());
    }
    result.epochs_run = epoch + 1;

    const double val = accuracy(predict(t.value(fused), split.validation), val_labels);
    const double val_loss = task_loss_value(t.value(fused), task, split.validation);
    if (val > best_val || (val == best_val && val_loss < best_loss)) {
      best_val = val;
      best_loss = val_loss;
      best_gate = gate;
      best_params = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= h2.patience) {
      break;
    }

    t.backward(loss);
    gate_adam.step(gate.flat(), std::vector<nd::Tensor>{t.grad(gw), t.grad(gb)});
    for (int i = 0; i < k; ++i) {
      std::vector<nd::Tensor> grads;
      for (nd::Var v : vars[i]) grads.push_back(t.grad(v));
      if (options.freeze) {
        for (const auto& g : grads)
          for (double x : g.data) result.frozen_grad_max = std::max(result.frozen_grad_max, std::abs(x));
        continue;
      }
      expert_adam[static_cast<std::size_t>(i)].step(params[i].flat(), grads);
    }
    for (nd::Parameter* p : gate.flat()) {
      if (!p->value.all_finite()) throw TrainingDiverged("gate parameters became non-finite");
    }
  }

  result.gate = best_gate;
  result.experts = best_params;
  result.fused_val_acc = best_val;
  std::vector<nd::Tensor> final_logits;
  for (int i = 0; i < k; ++i) {
    const Expert& e = experts[static_cast<std::size_t>(i)];
    final_logits.push_back(embed(e.config, best_params[i], *e.inputs));
  }
  const std::vector<int> test_labels = labels_of(task, split.test);
  const FusedOutput out = gate_fuse(final_logits, best_gate);
  if (!split.test.empty()) {
    result.fused_test_predictions = predict(out.logits, split.test);
    result.fused_test_acc = accuracy(result.fused_test_predictions, test_labels);
    for (int i = 0; i < k; ++i) {
      result.test_predictions.push_back(predict(final_logits[i], split.test));
      result.expert_test_acc.push_back(accuracy(result.test_predictions.back(), test_labels));
    }
    result.ec = expert_complementarity(result.test_predictions, test_labels);
  }
  return result;
}

}  // namespace gir
