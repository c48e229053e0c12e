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

#include "gir/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <utility>

#include "gir/error.hpp"
#include "gir/random.hpp"

namespace gir {

Graph random_digraph(int n, double mean_degree, std::uint64_t seed) {
  detail::require(n >= 2, "random_digraph needs at least two nodes");
  detail::require(mean_degree >= 0.0, "mean degree must be nonnegative");
  const auto target = static_cast<std::size_t>(std::llround(n * mean_degree));
  const auto max_edges = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1);
  detail::require(target <= max_edges, "mean degree too large for n");
  Rng rng(mix_seed(seed, 0xd16a));
  std::set<Edge> edges;
  while (edges.size() < target) {
    const auto u = static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    const auto v = static_cast<NodeId>(uniform_index(rng, static_cast<std::uint64_t>(n)));
    if (u != v) edges.insert({u, v});
  }
  const std::vector<Edge> list(edges.begin(), edges.end());
  return Graph::build(list, n, false);
}

std::vector<int> random_arm(int size, std::uint64_t seed) {
  detail::require(size >= 1, "arm needs at least one node");
  Rng rng(mix_seed(seed, 0xa53));
  std::vector<int> parent(static_cast<std::size_t>(size), -1);
  for (int i = 1; i < size; ++i) parent[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(i)));
  return parent;
}

namespace {

const std::array<DeskPreset, 6> kPresets{{
    {"email-npc", 32, 64, 8},
    {"europe-nc", 16, 8, 4},
    {"usa-nc", 32, 64, 8},
    {"celegans-lp", 16, 16, 8},
    {"ns-lp", 32, 64, 8},
    {"pb-lp", 32, 64, 8},
}};

// Undirected edge accumulator; u < v canonical.
struct EdgeSet {
  std::set<std::pair<NodeId, NodeId>> set;
  void add(NodeId u, NodeId v) {
    if (u != v) set.insert(std::minmax(u, v));
  }
  Graph build(int n) const {
    std::vector<Edge> list;
    list.reserve(set.size());
    for (const auto& [u, v] : set) list.push_back({u, v});
    return Graph::build(list, n, true);
  }
};

bool coin(Rng& rng, double p) { return uniform01(rng) < p; }

NodeId pick(Rng& rng, std::span<const NodeId> from) {
  return from[uniform_index(rng, static_cast<std::uint64_t>(from.size()))];
}

Dataset node_dataset(std::string name, Graph g, std::vector<int> labels) {
  Dataset d;
  d.name = std::move(name);
  d.features = NodeFeatures::ones(g.node_count());
  d.task.kind = TaskKind::kNodeClassification;
  d.task.node_labels = std::move(labels);
  d.graph = std::move(g);
  return d;
}

// Positives are the undirected edges; negatives are as many distinct
// unordered non-edges.
Dataset link_dataset(std::string name, Graph g, std::uint64_t seed) {
  Dataset d;
  d.name = std::move(name);
  d.features = NodeFeatures::ones(g.node_count());
  d.task.kind = TaskKind::kLinkPrediction;
  for (const Edge& e : g.edges()) {
    if (e.src < e.dst) d.task.pairs.push_back({e.src, e.dst, 1});
  }
  const std::size_t positives = d.task.pairs.size();
  std::set<std::pair<NodeId, NodeId>> seen;
  std::uint64_t round = 0;
  while (seen.size() < positives) {
    for (const Edge& e : sample_negative_pairs(g, positives, mix_seed(seed, ++round))) {
      if (seen.size() == positives) break;
      if (seen.insert(std::minmax(e.src, e.dst)).second) d.task.pairs.push_back({e.src, e.dst, 0});
    }
  }
  d.graph = std::move(g);
  return d;
}

Dataset make_email(std::uint64_t seed) {
  constexpr int kBlocks = 6, kBlockSize = 80, kPairs = 2000;
  const int n = kBlocks * kBlockSize;
  Rng rng(mix_seed(seed, 1));
  EdgeSet es;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng, u / kBlockSize == v / kBlockSize ? 0.12 : 0.006)) es.add(u, v);
  Dataset d;
  d.name = "email-npc";
  d.graph = es.build(n);
  d.features = NodeFeatures::ones(n);
  d.task.kind = TaskKind::kNodePairClassification;
  std::set<std::pair<NodeId, NodeId>> seen;
  int pos = 0, neg = 0;
  while (pos < kPairs || neg < kPairs) {
    const auto u = static_cast<NodeId>(uniform_index(rng, n));
    const auto v = static_cast<NodeId>(uniform_index(rng, n));
    if (u == v || !seen.insert(std::minmax(u, v)).second) continue;
    const int same = u / kBlockSize == v / kBlockSize;
    if ((same && pos >= kPairs) || (!same && neg >= kPairs)) continue;
    (same ? pos : neg) += 1;
    d.task.pairs.push_back({u, v, same});
  }
  return d;
}

// Hub-and-spoke regions: hubs form a clique per region and sparse
// inter-region links; spokes attach to two hubs, usually in their region.
Dataset make_regions(std::string name, int n, int hubs_per_region, std::uint64_t seed) {
  constexpr int kRegions = 4;
  Rng rng(mix_seed(seed, 2));
  std::vector<int> region(static_cast<std::size_t>(n));
  std::vector<std::vector<NodeId>> hubs(kRegions), members(kRegions);
  for (NodeId v = 0; v < n; ++v) {
    region[v] = v % kRegions;
    members[region[v]].push_back(v);
    if (v < kRegions * hubs_per_region) hubs[region[v]].push_back(v);
  }
  EdgeSet es;
  for (int r = 0; r < kRegions; ++r) {
    for (NodeId a : hubs[r]) {
      for (NodeId b : hubs[r]) es.add(a, b);
      for (int s = 0; s < kRegions; ++s) {
        if (s == r) continue;
        for (NodeId b : hubs[s])
          if (coin(rng, 0.15)) es.add(a, b);
      }
    }
  }
  for (NodeId v = kRegions * hubs_per_region; v < n; ++v) {
    for (int k = 0; k < 2; ++k) {
      const int r = coin(rng, 0.85) ? region[v] : static_cast<int>(uniform_index(rng, kRegions));
      es.add(v, pick(rng, hubs[r]));
    }
    es.add(v, pick(rng, members[region[v]]));
  }
  return node_dataset(std::move(name), es.build(n), std::move(region));
}

Dataset make_geometric(std::uint64_t seed) {
  constexpr int n = 300;
  const double radius = std::sqrt(14.0 / (3.141592653589793 * n));
  Rng rng(mix_seed(seed, 3));
  std::vector<std::pair<double, double>> pos(n);
  for (auto& p : pos) p = {uniform01(rng), uniform01(rng)};
  EdgeSet es;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      const double dx = pos[u].first - pos[v].first, dy = pos[u].second - pos[v].second;
      if (dx * dx + dy * dy < radius * radius) es.add(u, v);
    }
  return link_dataset("celegans-lp", es.build(n), seed);
}

Dataset make_groups(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 4));
  std::vector<std::vector<NodeId>> groups;
  int n = 0;
  while (n < 600) {
    const int size = 3 + static_cast<int>(uniform_index(rng, 8));
    std::vector<NodeId> g;
    for (int i = 0; i < size; ++i) g.push_back(n++);
    groups.push_back(std::move(g));
  }
  EdgeSet es;
  for (const auto& g : groups) {
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        if (coin(rng, 0.6)) es.add(g[i], g[j]);
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (!coin(rng, 0.5)) continue;
    const auto& other = groups[uniform_index(rng, groups.size())];
    es.add(pick(rng, groups[i]), pick(rng, other));
  }
  return link_dataset("ns-lp", es.build(n), seed);
}

Dataset make_blogs(std::uint64_t seed) {
  constexpr int n = 600;
  Rng rng(mix_seed(seed, 5));
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = std::min(150.0, 8.0 / std::pow(1.0 - uniform01(rng), 1.0 / 1.8));  // Pareto, mean near 18
    total += x;
  }
  EdgeSet es;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) {
      const double mix = (u % 2 == v % 2) ? 1.8 : 0.2;
      if (coin(rng, std::min(1.0, mix * w[u] * w[v] / total))) es.add(u, v);
    }
  return link_dataset("pb-lp", es.build(n), seed);
}

}  // namespace

std::span<const DeskPreset> desk_presets() { return kPresets; }

const DeskPreset& desk_preset(const std::string& name) {
  for (const DeskPreset& p : kPresets) {
    if (p.name == name) return p;
  }
  throw FormatError("unknown desk dataset '" + name + "'");
}

Dataset make_desk_dataset(const std::string& name, std::uint64_t seed) {
  if (name == "email-npc") return make_email(seed);
  if (name == "europe-nc") return make_regions(name, 400, 3, seed);
  if (name == "usa-nc") return make_regions(name, 800, 6, seed);
  if (name == "celegans-lp") return make_geometric(seed);
  if (name == "ns-lp") return make_groups(seed);
  if (name == "pb-lp") return make_blogs(seed);
  throw FormatError("unknown desk dataset '" + name + "'");
}

TwoViewFixture make_two_view_fixture(int hubs_per_side, std::uint64_t seed) {
  detail::require(hubs_per_side >= 3, "two-view fixture needs at least three hubs per side");
  Rng rng(mix_seed(seed, 6));
  const int h = hubs_per_side;
  const int n = 4 * h;
  // Left: hubs [0, h), leaves [h, 2h). Right: shifted by 2h.
  std::vector<std::pair<int, int>> chords;
  for (int i = 0; i < h; ++i) {
    chords.emplace_back(i, (i + 1) % h);
    if (coin(rng, 0.3)) chords.emplace_back(i, static_cast<int>(uniform_index(rng, h)));
  }
  EdgeSet es;
  for (int side = 0; side < 2; ++side) {
    const int off = side * 2 * h;
    for (const auto& [a, b] : chords) es.add(off + a, off + b);
    for (int i = 0; i < h; ++i) es.add(off + i, off + h + i);
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  std::vector<double> attr(static_cast<std::size_t>(n), 0.0);
  for (int side = 0; side < 2; ++side) {
    const int off = side * 2 * h;
    for (int i = 0; i < h; ++i) {
      labels[off + i] = side;
      const int bit = static_cast<int>(uniform_index(rng, 2));
      labels[off + h + i] = 2 + bit;
      attr[off + h + i] = 2.0 * bit - 1.0;
    }
  }
  TwoViewFixture f;
  f.data = node_dataset("two-view", es.build(n), std::move(labels));
  f.structure_view = f.data.features;
  f.attribute_view.rows = n;
  f.attribute_view.dim = 3;
  for (int v = 0; v < n; ++v) {
    const bool leaf = (v % (2 * h)) >= h;
    f.attribute_view.values.push_back(1.0);
    f.attribute_view.values.push_back(leaf ? 1.0 : 0.0);
    f.attribute_view.values.push_back(attr[v]);
  }
  f.anchors.strategy = AnchorStrategy::kTopDegree;
  for (NodeId v = 0; v < h; ++v) f.anchors.nodes.push_back(v);
  return f;
}

}  // namespace gir
