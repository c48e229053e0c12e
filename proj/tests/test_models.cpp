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
#include <vector>

#include "gir/error.hpp"
#include "gir/generators.hpp"
#include "gir/harness.hpp"
#include "gir/models.hpp"
#include "test_util.hpp"

namespace gir {
namespace {

using testing::gradient_error;
using testing::graph_of;

constexpr Variant kAllVariants[] = {Variant::kGcn,  Variant::kGcnA, Variant::kGcnO,  Variant::kGir,
                                    Variant::kGirA, Variant::kGirO, Variant::kGirMix};

NodeFeatures random_features(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  NodeFeatures x{n, dim, std::vector<double>(static_cast<std::size_t>(n) * dim), false};
  for (double& v : x.values) v = uniform_real(rng, -1.0, 1.0);
  return x;
}

AnchorSet anchors_of(std::vector<NodeId> nodes) {
  AnchorSet a;
  a.nodes = std::move(nodes);
  return a;
}

double max_row_gap(const nd::Tensor& z, NodeId a, NodeId b) {
  double gap = 0.0;
  for (int c = 0; c < z.cols; ++c) gap = std::max(gap, std::abs(z(a, c) - z(b, c)));
  return gap;
}

TEST(Augment, AnchorOneHotColumn) {
  const NodeFeatures x = NodeFeatures::ones(3);
  const AnchorSet a = anchors_of({2});
  const NodeFeatures y = augment_features(x, FeatureMode::kAnchorOneHot, &a);
  ASSERT_EQ(y.dim, 2);
  EXPECT_EQ(y.at(0, 1), 0.0);
  EXPECT_EQ(y.at(1, 1), 0.0);
  EXPECT_EQ(y.at(2, 1), 1.0);
  for (int r = 0; r < 3; ++r) EXPECT_EQ(y.at(r, 0), 1.0);
}

TEST(Augment, AnchorOrderPicksColumnAndNodeOneHotIsIdentity) {
  const NodeFeatures x = NodeFeatures::ones(4);
  const AnchorSet a = anchors_of({3, 1});
  const NodeFeatures y = augment_features(x, FeatureMode::kAnchorOneHot, &a);
  EXPECT_EQ(y.at(3, 1), 1.0);
  EXPECT_EQ(y.at(1, 2), 1.0);
  EXPECT_EQ(y.at(1, 1), 0.0);
  const NodeFeatures o = augment_features(x, FeatureMode::kNodeOneHot);
  ASSERT_EQ(o.dim, 5);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) EXPECT_EQ(o.at(r, 1 + c), r == c ? 1.0 : 0.0);
}

TEST(Layers, GcnSingleNodeIdentity) {
  nd::Tape t;
  const nd::Tensor x(1, 3, {0.5, -2.0, 7.0});
  const std::vector<std::vector<int>> groups{{0}};
  const nd::Var out = gcn_layer(t, t.constant(x), groups, t.constant(nd::Tensor::identity(3)),
                                t.constant(nd::Tensor(1, 3)), false);
  EXPECT_EQ(t.value(out), x);
}

TEST(Layers, GcnRegularGraphGivesIdenticalRows) {
  std::vector<Edge> ring;
  for (int i = 0; i < 12; ++i) ring.push_back({i, (i + 1) % 12});
  const Graph g = Graph::build(ring, 12, true);
  ModelConfig cfg{.variant = Variant::kGcn, .layers = 3, .hidden = 8, .out_dim = 4};
  const ModelInputs in = ModelInputs::prepare(cfg, g, NodeFeatures::ones(12), {});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const nd::Tensor z = embed(cfg, init_params(cfg, 1, seed), in);
    for (int v = 1; v < 12; ++v) EXPECT_LT(max_row_gap(z, 0, v), 1e-12);
  }
}

TEST(Layers, GirWithoutSourcesIsAnMlp) {
  Rng rng(3);
  const nd::Tensor x = nd::glorot_uniform(4, 3, rng);
  const nd::Tensor w = nd::glorot_uniform(6, 2, rng);
  const nd::Tensor b(1, 2, {0.1, -0.2});
  const std::vector<std::vector<int>> none(4);
  nd::Tape t;
  const nd::Tensor& got = t.value(sage_gir_layer(t, t.constant(x), none, t.constant(w), t.constant(b), false));
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 2; ++c) {
      double expect = b(0, c);
      for (int k = 0; k < 3; ++k) expect += x(r, k) * w(k, c);  // message half is zero
      EXPECT_NEAR(got(r, c), expect, 1e-14);
    }
  }
}

TEST(Layers, SingleSourceMessageIsThatRow) {
  Rng rng(4);
  const nd::Tensor x = nd::glorot_uniform(3, 2, rng);
  // Weights that select the message half only.
  nd::Tensor w(4, 2);
  w(2, 0) = 1.0;
  w(3, 1) = 1.0;
  const std::vector<std::vector<int>> active{{}, {}, {0}};
  nd::Tape t;
  const nd::Tensor& got = t.value(sage_gir_layer(t, t.constant(x), active, t.constant(w), t.constant(nd::Tensor(1, 2)), false));
  EXPECT_EQ(got(2, 0), x(0, 0));
  EXPECT_EQ(got(2, 1), x(0, 1));
}

TEST(Forward, MirrorSymmetryAndAnchorAsymmetry) {
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const MirrorGraph m = make_mirror_graph(random_arm(6, draw));
    const int n = m.graph.node_count();
    const NodeFeatures ones = NodeFeatures::ones(n);

    ModelConfig gcn{.variant = Variant::kGcn, .layers = 3, .hidden = 8, .out_dim = 4};
    const ModelInputs gin = ModelInputs::prepare(gcn, m.graph, ones, {});
    const nd::Tensor zg = embed(gcn, init_params(gcn, 1, draw), gin);

    ModelConfig gir{.variant = Variant::kGir, .layers = 3, .hidden = 8, .out_dim = 4};
    const ModelInputs sym = ModelInputs::prepare(gir, m.graph, ones, anchors_of({m.bridge}));
    const ModelInputs asym = ModelInputs::prepare(gir, m.graph, ones, anchors_of({0}));
    const ModelParams p = init_params(gir, 1, 100 + draw);
    const nd::Tensor zs = embed(gir, p, sym);
    const nd::Tensor za = embed(gir, p, asym);

    double worst_sym = 0.0;
    double best_asym = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      worst_sym = std::max({worst_sym, max_row_gap(zg, v, m.pairing[v]), max_row_gap(zs, v, m.pairing[v])});
      best_asym = std::max(best_asym, max_row_gap(za, v, m.pairing[v]));
    }
    EXPECT_LT(worst_sym, 1e-6);
    EXPECT_GT(best_asym, 1e-3);
  }
}

// Full-graph SAGE written straight from the layer definition.
nd::Tensor sage_oracle(const Graph& g, const nd::Tensor& x, const ModelParams& p) {
  nd::Tensor h = x;
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const nd::Tensor& w = p.layers[l][0].weight.value;
    const nd::Tensor& b = p.layers[l][0].bias.value;
    nd::Tensor out(h.rows, w.cols);
    for (NodeId v = 0; v < h.rows; ++v) {
      std::vector<double> cat(2 * h.cols, 0.0);
      for (int c = 0; c < h.cols; ++c) cat[c] = h(v, c);
      const auto nb = g.in_neighbors(v);
      for (NodeId u : nb)
        for (int c = 0; c < h.cols; ++c) cat[h.cols + c] += h(u, c) / static_cast<double>(nb.size());
      for (int j = 0; j < w.cols; ++j) {
        double s = b(0, j);
        for (std::size_t k = 0; k < cat.size(); ++k) s += cat[k] * w(static_cast<int>(k), j);
        out(v, j) = l + 1 == p.layers.size() ? s : std::max(0.0, s);
      }
    }
    h = out;
  }
  return h;
}

TEST(Forward, AllAnchorsGirIsSage) {
  std::vector<Edge> list = random_digraph(30, 2.0, 8).edges();
  for (int i = 0; i < 30; ++i) list.push_back({i, (i + 1) % 30});
  const Graph g = Graph::build(list, 30, true);
  std::vector<NodeId> all(30);
  for (int i = 0; i < 30; ++i) all[i] = i;
  const NodeFeatures x = random_features(30, 3, 5);
  ModelConfig cfg{.variant = Variant::kGir, .layers = 3, .hidden = 6, .out_dim = 4};
  const ModelInputs in = ModelInputs::prepare(cfg, g, x, anchors_of(all));
  const ModelParams p = init_params(cfg, 3, 9);
  const nd::Tensor got = embed(cfg, p, in);
  const nd::Tensor want = sage_oracle(g, in.features, p);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got.data[i], want.data[i], 1e-12);
}

TEST(Forward, SingleSetMixIsPlainGir) {
  const Graph g = random_digraph(25, 2.5, 1);
  const NodeFeatures x = random_features(25, 2, 2);
  const AnchorSet a = anchors_of({0, 5, 9, 14});
  ModelConfig gir{.variant = Variant::kGir, .layers = 3, .hidden = 8, .out_dim = 3};
  ModelConfig mix = gir;
  mix.variant = Variant::kGirMix;
  mix.anchor_sets = 1;
  const ModelParams p = init_params(gir, 2, 4);
  EXPECT_EQ(p, init_params(mix, 2, 4));
  EXPECT_EQ(embed(gir, p, ModelInputs::prepare(gir, g, x, a)), embed(mix, p, ModelInputs::prepare(mix, g, x, a)));
}

TEST(Forward, MixWidthsWithFourSets) {
  const Graph g = random_digraph(40, 3.0, 2);
  AnchorSet a;
  for (int i = 0; i < 8; ++i) a.nodes.push_back(i * 5);
  ModelConfig cfg{.variant = Variant::kGirMix, .layers = 3, .hidden = 16, .out_dim = 16, .anchor_sets = 4};
  const ModelInputs in = ModelInputs::prepare(cfg, g, NodeFeatures::ones(40), a);
  ASSERT_EQ(in.schedules.size(), 4u);
  const ModelParams p = init_params(cfg, 1, 0);
  for (const auto& layer : p.layers) {
    ASSERT_EQ(layer.size(), 4u);
    for (const DenseBlock& b : layer) EXPECT_EQ(b.weight.value.cols, 4);
  }
  // Later layers read the full concatenated width.
  EXPECT_EQ(p.layers[1][0].weight.value.rows, 2 * 16);
  EXPECT_EQ(embed(cfg, p, in).cols, 16);
}

TEST(Forward, UnreachedNodeSeesOnlyItself) {
  // 0 -> 1 -> 2 is anchored at 0; 3 -> 4 is never reached.
  const Graph g = graph_of({{0, 1}, {1, 2}, {3, 4}}, 5);
  ModelConfig cfg{.variant = Variant::kGir, .layers = 3, .hidden = 5, .out_dim = 3};
  const ModelParams p = init_params(cfg, 2, 6);
  NodeFeatures x = random_features(5, 2, 1);
  const nd::Tensor base = embed(cfg, p, ModelInputs::prepare(cfg, g, x, anchors_of({0})));
  for (std::uint64_t s = 0; s < 5; ++s) {
    NodeFeatures y = random_features(5, 2, 50 + s);
    y.values[8] = x.values[8];
    y.values[9] = x.values[9];
    const nd::Tensor z = embed(cfg, p, ModelInputs::prepare(cfg, g, y, anchors_of({0})));
    for (int c = 0; c < 3; ++c) EXPECT_EQ(z(4, c), base(4, c));
  }
}

TEST(Forward, MismatchedScheduleRejected) {
  const Graph g = random_digraph(10, 2.0, 0);
  ModelConfig cfg{.variant = Variant::kGir, .layers = 3, .hidden = 4, .out_dim = 2};
  const ModelInputs in = ModelInputs::prepare(cfg, g, NodeFeatures::ones(10), anchors_of({0}));
  ModelConfig deeper = cfg;
  deeper.layers = 4;
  EXPECT_THROW(embed(deeper, init_params(deeper, 1, 0), in), InvalidArgument);
  EXPECT_THROW(ModelInputs::prepare(cfg, g, NodeFeatures::ones(10), {}), InvalidArgument);
}

TEST(Gradients, EveryVariantOnFiveNodeFixtures) {
  for (Variant variant : kAllVariants) {
    for (std::uint64_t draw = 0; draw < 5; ++draw) {
      const Graph g = random_digraph(5, 1.6, draw);
      const NodeFeatures x = random_features(5, 2, 10 + draw);
      ModelConfig cfg{.variant = variant, .layers = 3, .hidden = 4, .out_dim = 3, .anchor_sets = 2};
      const ModelInputs in = ModelInputs::prepare(cfg, g, x, anchors_of({0, 1, 2, 3}));
      ModelParams p = init_params(cfg, in.features.cols, 20 + draw);
      for (auto& layer : p.layers)
        for (auto& b : layer) b.bias.value.data.assign(b.bias.value.size(), 0.05);
      LabeledTask task{TaskKind::kNodeClassification, {0, 1, 2, 1, 0}, {}};
      const std::vector<int> items{0, 1, 2, 3, 4};
      const double err = gradient_error(
          [&](nd::Tape& t, std::vector<nd::Var>& vars) {
            return task_loss(t, forward(t, cfg, p, in, &vars), task, items);
          },
          p.flat());
      EXPECT_LT(err, 1e-4) << variant_name(variant) << " draw " << draw;
    }
  }
}

TEST(Gradients, PairLossThroughGir) {
  const Graph g = random_digraph(5, 2.0, 3);
  ModelConfig cfg{.variant = Variant::kGirA, .layers = 2, .hidden = 4, .out_dim = 3};
  const ModelInputs in = ModelInputs::prepare(cfg, g, random_features(5, 2, 1), anchors_of({1, 4}));
  ModelParams p = init_params(cfg, in.features.cols, 2);
  LabeledTask task{TaskKind::kLinkPrediction, {}, {{0, 1, 1}, {2, 3, 0}, {4, 0, 1}, {1, 3, 0}}};
  const std::vector<int> items{0, 1, 2, 3};
  const double err = gradient_error(
      [&](nd::Tape& t, std::vector<nd::Var>& vars) { return task_loss(t, forward(t, cfg, p, in, &vars), task, items); },
      p.flat());
  EXPECT_LT(err, 1e-4);
}

TEST(PairScore, DotProductExamples) {
  EXPECT_EQ(pair_score(std::vector<double>{0.6, 0.8}, std::vector<double>{0.6, 0.8}), 1.0);
  EXPECT_EQ(pair_score(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_EQ(pair_score(std::vector<double>{1, 2}, std::vector<double>{3, -1}), 1.0);
  EXPECT_THROW(pair_score(std::vector<double>{1}, std::vector<double>{1, 2}), InvalidArgument);
}

struct SmallTask {
  Graph g;
  LabeledTask task;
  SplitSpec split;
};

SmallTask small_node_task() {
  SmallTask s;
  s.g = random_digraph(60, 3.0, 1);
  s.task.kind = TaskKind::kNodeClassification;
  for (int v = 0; v < 60; ++v) s.task.node_labels.push_back(v % 3);
  s.split = split_dataset(s.task, 0);
  return s;
}

TEST(Train, ZeroLearningRateKeepsInitialParameters) {
  const SmallTask s = small_node_task();
  ModelConfig cfg{.variant = Variant::kGirA, .layers = 2, .hidden = 8, .out_dim = 3};
  const ModelInputs in = ModelInputs::prepare(cfg, s.g, NodeFeatures::ones(60), anchors_of({0, 7, 21}));
  const TrainHyper hyper{.learning_rate = 0.0, .weight_decay = 1e-5, .epochs = 10, .patience = 100, .seed = 3};
  const TrainResult r = train_model(cfg, in, s.task, s.split, hyper);
  EXPECT_EQ(r.params, init_params(cfg, in.features.cols, 3));
  for (const EpochRecord& e : r.trace) EXPECT_EQ(e.train_loss, r.trace[0].train_loss);
}

TEST(Train, SameSeedSameTrace) {
  const SmallTask s = small_node_task();
  ModelConfig cfg{.variant = Variant::kGirMix, .layers = 3, .hidden = 8, .out_dim = 4, .anchor_sets = 2};
  const ModelInputs in = ModelInputs::prepare(cfg, s.g, NodeFeatures::ones(60), anchors_of({0, 7, 21, 33}));
  const TrainHyper hyper{.epochs = 30, .patience = 30, .seed = 11};
  const TrainResult a = train_model(cfg, in, s.task, s.split, hyper);
  const TrainResult b = train_model(cfg, in, s.task, s.split, hyper);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].train_loss, b.trace[i].train_loss);
    EXPECT_EQ(a.trace[i].val_metric, b.trace[i].val_metric);
  }
  EXPECT_EQ(a.params, b.params);
}

TEST(Train, PatienceStopsEarly) {
  const SmallTask s = small_node_task();
  ModelConfig cfg{.variant = Variant::kGcn, .layers = 2, .hidden = 4, .out_dim = 3};
  const ModelInputs in = ModelInputs::prepare(cfg, s.g, NodeFeatures::ones(60), {});
  const TrainHyper hyper{.learning_rate = 0.0, .epochs = 100, .patience = 5, .seed = 0};
  // Nothing can improve at lr 0, so training stops patience epochs after the first.
  EXPECT_EQ(train_model(cfg, in, s.task, s.split, hyper).trace.size(), 6u);
}

TEST(Train, BestEpochLossNotAboveInitialOnDeskFixtures) {
  for (const DeskPreset& preset : desk_presets()) {
    const Dataset data = make_desk_dataset(preset.name, 0);
    const SplitSpec split = split_dataset(data.task, 0);
    const Graph g = message_graph(data, split);
    const AnchorSet anchors = select_anchors(g, preset.anchors, AnchorStrategy::kGreedyCover, 0);
    ModelConfig cfg{.variant = Variant::kGirA, .layers = 3, .hidden = preset.hidden,
                    .out_dim = data.task.is_pair_task() ? preset.hidden : data.task.class_count()};
    const ModelInputs in = ModelInputs::prepare(cfg, g, data.features, anchors);
    const TrainResult r = train_model(cfg, in, data.task, split, {.epochs = 60, .patience = 60, .seed = 1});
    EXPECT_LE(r.trace[r.best_epoch].train_loss, r.trace[0].train_loss) << preset.name;
  }
}

}  // namespace
}  // namespace gir
