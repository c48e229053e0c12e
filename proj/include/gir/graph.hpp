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

namespace gir {

using NodeId = std::int32_t;

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph in compressed adjacency form.
///
/// Both the successor lists and the in-neighbor lists are sorted ascending, and
/// each edge appears exactly once in each. Self-loops and duplicate edges are
/// dropped at construction.
class Graph {
 public:
  Graph() = default;

  /// Builds the canonical graph. With `bidirected`, every input pair is stored
  /// in both directions. Throws InvalidArgument when n == 0 or an endpoint is
  /// out of range.
  static Graph build(std::span<const Edge> edges, int n, bool bidirected);

  int node_count() const { return n_; }
  std::size_t edge_count() const { return out_nbrs_.size(); }

  std::span<const NodeId> successors(NodeId v) const {
    return {out_nbrs_.data() + out_off_[v], out_nbrs_.data() + out_off_[v + 1]};
  }
  /// In-neighborhood, the N(v) that messages are aggregated over.
  std::span<const NodeId> in_neighbors(NodeId v) const {
    return {in_nbrs_.data() + in_off_[v], in_nbrs_.data() + in_off_[v + 1]};
  }

  int out_degree(NodeId v) const { return out_off_[v + 1] - out_off_[v]; }
  int in_degree(NodeId v) const { return in_off_[v + 1] - in_off_[v]; }

  bool has_edge(NodeId u, NodeId v) const;
  bool valid(NodeId v) const { return v >= 0 && v < n_; }

  /// All edges sorted by (src, dst).
  std::vector<Edge> edges() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int n_ = 0;
  std::vector<int> out_off_{0};
  std::vector<NodeId> out_nbrs_;
  std::vector<int> in_off_{0};
  std::vector<NodeId> in_nbrs_;
};

/// Hop distance from a node set; std::nullopt means unreachable.
using Distance = std::optional<int>;
using DistanceVector = std::vector<Distance>;

/// Exact hop distances from `sources` following out-edges.
DistanceVector multi_source_bfs(const Graph& g, std::span<const NodeId> sources);

/// Node attribute matrix, n rows of `dim` values.
struct NodeFeatures {
  int rows = 0;
  int dim = 0;
  std::vector<double> values;
  bool placeholder = false;

  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * dim + c]; }

  /// All-ones single column, used for unattributed graphs.
  static NodeFeatures ones(int n);
};

enum class TaskKind { kNodeClassification, kLinkPrediction, kNodePairClassification };

const char* task_kind_name(TaskKind kind);
TaskKind parse_task_kind(const std::string& name);

struct LabeledPair {
  NodeId u = 0;
  NodeId v = 0;
  int label = 0;

  friend bool operator==(const LabeledPair&, const LabeledPair&) = default;
};

struct LabeledTask {
  TaskKind kind = TaskKind::kNodeClassification;
  std::vector<int> node_labels;     // node tasks: one label per node
  std::vector<LabeledPair> pairs;   // pair tasks

  bool is_pair_task() const { return kind != TaskKind::kNodeClassification; }
  std::size_t item_count() const { return is_pair_task() ? pairs.size() : node_labels.size(); }
  int class_count() const;

  /// Checks ids against `n` and that classes are contiguous from 0.
  void validate(int n) const;
};

/// Disjoint index sets into the task's items.
struct SplitSpec {
  std::vector<int> train;
  std::vector<int> validation;
  std::vector<int> test;
  std::uint64_t seed = 0;
};

/// 60/20/20 for node tasks, 80/10/10 for pair tasks, uniformly shuffled.
SplitSpec split_dataset(const LabeledTask& task, std::uint64_t seed);

/// Uniformly samples `count` distinct ordered non-edges (u != v).
std::vector<Edge> sample_negative_pairs(const Graph& g, std::size_t count, std::uint64_t seed);

/// Two copies of a tree arm joined through a bridge node.
struct MirrorGraph {
  Graph graph;
  /// pairing[v] is the image of v under the copy-swapping automorphism.
  std::vector<NodeId> pairing;
  NodeId bridge = 0;
  int arm_size = 0;
};

/// `arm_parent[i]` is the parent of arm node i (i > 0) and must be < i;
/// arm_parent[0] is ignored and node 0 is the root attached to the bridge.
/// Left copy occupies ids [0, k), right copy [k, 2k), bridge is 2k. Edges are
/// bidirected.
MirrorGraph make_mirror_graph(std::span<const int> arm_parent);

// Text formats ---------------------------------------------------------------

struct EdgeList {
  std::vector<Edge> edges;
  int node_count = 0;  // max id + 1
};

/// One edge per line, two whitespace-separated ids; '#' lines are comments.
EdgeList read_edge_list(const std::filesystem::path& path);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// "u label" lines for node tasks, "u v label" lines for pair tasks.
LabeledTask read_label_file(const std::filesystem::path& path, TaskKind kind, int n);
void write_label_file(const std::filesystem::path& path, const LabeledTask& task);

}  // namespace gir
