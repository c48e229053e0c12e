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

#include "gir/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>

#include "gir/error.hpp"
#include "gir/random.hpp"

namespace gir {
namespace {

void fill_csr(int n, std::vector<std::pair<NodeId, NodeId>> keyed, std::vector<int>& off,
              std::vector<NodeId>& nbrs) {
  std::sort(keyed.begin(), keyed.end());
  off.assign(static_cast<std::size_t>(n) + 1, 0);
  nbrs.clear();
  nbrs.reserve(keyed.size());
  for (const auto& [key, nbr] : keyed) {
    ++off[key + 1];
    nbrs.push_back(nbr);
  }
  std::partial_sum(off.begin(), off.end(), off.begin());
}

}  // namespace

Graph Graph::build(std::span<const Edge> edges, int n, bool bidirected) {
  detail::require(n > 0, "graph must have at least one node");
  std::vector<Edge> canon;
  canon.reserve(edges.size() * (bidirected ? 2 : 1));
  for (const Edge& e : edges) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      detail::fail("edge endpoint out of range: (" + std::to_string(e.src) + ", " +
                   std::to_string(e.dst) + ") with n = " + std::to_string(n));
    }
    if (e.src == e.dst) continue;
    canon.push_back(e);
    if (bidirected) canon.push_back({e.dst, e.src});
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

  Graph g;
  g.n_ = n;
  std::vector<std::pair<NodeId, NodeId>> out_keyed, in_keyed;
  out_keyed.reserve(canon.size());
  in_keyed.reserve(canon.size());
  for (const Edge& e : canon) {
    out_keyed.emplace_back(e.src, e.dst);
    in_keyed.emplace_back(e.dst, e.src);
  }
  fill_csr(n, std::move(out_keyed), g.out_off_, g.out_nbrs_);
  fill_csr(n, std::move(in_keyed), g.in_off_, g.in_nbrs_);
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (!valid(u) || !valid(v)) return false;
  const auto succ = successors(u);
  return std::binary_search(succ.begin(), succ.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < n_; ++u) {
    for (NodeId v : successors(u)) out.push_back({u, v});
  }
  return out;
}

DistanceVector multi_source_bfs(const Graph& g, std::span<const NodeId> sources) {
  detail::require(!sources.empty(), "multi_source_bfs needs at least one source");
  DistanceVector dist(static_cast<std::size_t>(g.node_count()));
  std::deque<NodeId> queue;
  for (NodeId s : sources) {
    detail::require(g.valid(s), "source id out of range: " + std::to_string(s));
    if (!dist[s]) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : g.successors(u)) {
      if (!dist[v]) {
        dist[v] = *dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

NodeFeatures NodeFeatures::ones(int n) {
  NodeFeatures x;
  x.rows = n;
  x.dim = 1;
  x.values.assign(static_cast<std::size_t>(n), 1.0);
  x.placeholder = true;
  return x;
}

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kNodeClassification: return "nc";
    case TaskKind::kLinkPrediction: return "lp";
    case TaskKind::kNodePairClassification: return "npc";
  }
  return "?";
}

TaskKind parse_task_kind(const std::string& name) {
  if (name == "nc") return TaskKind::kNodeClassification;
  if (name == "lp") return TaskKind::kLinkPrediction;
  if (name == "npc") return TaskKind::kNodePairClassification;
  throw FormatError("unknown task kind '" + name + "' (expected nc, lp or npc)");
}

int LabeledTask::class_count() const {
  if (is_pair_task()) return 2;
  int max_label = -1;
  for (int y : node_labels) max_label = std::max(max_label, y);
  return max_label + 1;
}

void LabeledTask::validate(int n) const {
  if (is_pair_task()) {
    for (const auto& p : pairs) {
      detail::require(p.u >= 0 && p.u < n && p.v >= 0 && p.v < n, "pair references invalid node");
      detail::require(p.label == 0 || p.label == 1, "pair labels must be binary");
    }
    return;
  }
  detail::require(static_cast<int>(node_labels.size()) == n, "node task needs one label per node");
  std::set<int> seen(node_labels.begin(), node_labels.end());
  int expect = 0;
  for (int y : seen) {
    detail::require(y == expect, "class labels must be contiguous integers starting at 0");
    ++expect;
  }
}

SplitSpec split_dataset(const LabeledTask& task, std::uint64_t seed) {
  const std::size_t count = task.item_count();
  detail::require(count >= 5, "split_dataset needs at least 5 labeled items");
  const double holdout = task.is_pair_task() ? 0.1 : 0.2;
  const auto n_holdout = static_cast<std::size_t>(static_cast<double>(count) * holdout + 1e-9);

  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  shuffle(std::span<int>(order), rng);

  SplitSpec split;
  split.seed = seed;
  split.validation.assign(order.begin(), order.begin() + n_holdout);
  split.test.assign(order.begin() + n_holdout, order.begin() + 2 * n_holdout);
  split.train.assign(order.begin() + 2 * n_holdout, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::vector<Edge> sample_negative_pairs(const Graph& g, std::size_t count, std::uint64_t seed) {
  const auto n = static_cast<std::uint64_t>(g.node_count());
  const std::uint64_t non_edges = n * (n - 1) - g.edge_count();
  if (count > non_edges) {
    detail::fail("graph too dense: " + std::to_string(non_edges) + " non-edges available, " +
                 std::to_string(count) + " requested");
  }
  Rng rng(seed);
  std::vector<Edge> out;
  out.reserve(count);
  if (count * 2 > non_edges) {
    // Dense regime: enumerate then take a shuffled prefix.
    std::vector<Edge> all;
    all.reserve(non_edges);
    for (NodeId u = 0; u < static_cast<NodeId>(n); ++u) {
      for (NodeId v = 0; v < static_cast<NodeId>(n); ++v) {
        if (u != v && !g.has_edge(u, v)) all.push_back({u, v});
      }
    }
    shuffle(std::span<Edge>(all), rng);
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
  }
  std::unordered_set<std::uint64_t> taken;
  while (out.size() < count) {
    const auto u = static_cast<NodeId>(uniform_index(rng, n));
    const auto v = static_cast<NodeId>(uniform_index(rng, n));
    if (u == v || g.has_edge(u, v)) continue;
    if (!taken.insert(static_cast<std::uint64_t>(u) * n + static_cast<std::uint64_t>(v)).second) continue;
    out.push_back({u, v});
  }
  return out;
}

MirrorGraph make_mirror_graph(std::span<const int> arm_parent) {
  detail::require(!arm_parent.empty(), "mirror arm must have at least one node");
  const int k = static_cast<int>(arm_parent.size());
  std::vector<Edge> edges;
  for (int i = 1; i < k; ++i) {
    const int p = arm_parent[i];
    detail::require(p >= 0 && p < i, "arm parent must precede its child");
    edges.push_back({p, i});
    edges.push_back({p + k, i + k});
  }
  const NodeId bridge = 2 * k;
  edges.push_back({0, bridge});
  edges.push_back({k, bridge});

  MirrorGraph m;
  m.graph = Graph::build(edges, 2 * k + 1, /*bidirected=*/true);
  m.pairing.resize(static_cast<std::size_t>(2 * k + 1));
  for (int i = 0; i < k; ++i) {
    m.pairing[i] = i + k;
    m.pairing[i + k] = i;
  }
  m.pairing[bridge] = bridge;
  m.bridge = bridge;
  m.arm_size = k;
  return m;
}

EdgeList read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open edge list: " + path.string());
  EdgeList list;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long u = -1, v = -1;
    if (!(fields >> u >> v) || u < 0 || v < 0) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected two node ids");
    }
    list.edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
    list.node_count = std::max<int>(list.node_count, static_cast<int>(std::max(u, v)) + 1);
  }
  return list;
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write edge list: " + path.string());
  out << "# nodes " << g.node_count() << "\n";
  for (const Edge& e : g.edges()) out << e.src << ' ' << e.dst << '\n';
}

LabeledTask read_label_file(const std::filesystem::path& path, TaskKind kind, int n) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open label file: " + path.string());
  LabeledTask task;
  task.kind = kind;
  if (kind == TaskKind::kNodeClassification) task.node_labels.assign(static_cast<std::size_t>(n), -1);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (kind == TaskKind::kNodeClassification) {
      long long u = -1, y = -1;
      if (!(fields >> u >> y) || u < 0 || u >= n || y < 0) throw FormatError(where + ": expected 'u label'");
      task.node_labels[u] = static_cast<int>(y);
    } else {
      long long u = -1, v = -1, y = -1;
      if (!(fields >> u >> v >> y) || u < 0 || v < 0 || u >= n || v >= n || (y != 0 && y != 1)) {
        throw FormatError(where + ": expected 'u v label' with binary label");
      }
      task.pairs.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v), static_cast<int>(y)});
    }
  }
  if (kind == TaskKind::kNodeClassification) {
    for (int y : task.node_labels) {
      if (y < 0) throw FormatError(path.string() + ": every node needs a label");
    }
  }
  return task;
}

void write_label_file(const std::filesystem::path& path, const LabeledTask& task) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write label file: " + path.string());
  if (task.is_pair_task()) {
    for (const auto& p : task.pairs) out << p.u << ' ' << p.v << ' ' << p.label << '\n';
  } else {
    for (std::size_t v = 0; v < task.node_labels.size(); ++v) out << v << ' ' << task.node_labels[v] << '\n';
  }
}

}  // namespace gir
