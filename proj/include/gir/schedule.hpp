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

#include <span>
#include <string>
#include <vector>

#include "gir/anchors.hpp"
#include "gir/graph.hpp"

namespace gir {

/// How the per-layer source set advances.
///   literal:   SRC_{l+1} = successors(SRC_l), revisits allowed
///   bfs-shell: SRC_l = { v : d(v, anchors) = l - 1 }
enum class ScheduleMode { kLiteral, kBfsShell };

const char* schedule_mode_name(ScheduleMode mode);
ScheduleMode parse_schedule_mode(const std::string& name);

/// Streams SRC_1, SRC_2, ... without materializing edge lists; Schedule is
/// built from it, and deep certification runs use it directly.
class FrontierWalker {
 public:
  FrontierWalker(const Graph& g, std::span<const NodeId> anchors, ScheduleMode mode);

  int layer() const { return layer_; }
  /// Sorted SRC for the current layer.
  const std::vector<NodeId>& sources() const { return sources_; }
  void advance();

 private:
  const Graph* g_;
  ScheduleMode mode_;
  int layer_ = 1;
  std::vector<NodeId> sources_;
  DistanceVector dist_;
  std::vector<std::vector<NodeId>> shells_;  // bfs-shell: nodes by distance
  std::vector<char> mark_;
};

/// Per-layer message sources and active edges, anchored at SRC_1 = anchors.
class Schedule {
 public:
  static Schedule build(const Graph& g, std::span<const NodeId> anchors, int layers, ScheduleMode mode);

  int layers() const { return static_cast<int>(sources_.size()); }
  ScheduleMode mode() const { return mode_; }

  /// Sorted SRC_l for l in [1, layers].
  std::span<const NodeId> sources(int layer) const { return sources_.at(layer - 1); }
  /// Edges (u, v) of the graph with u in SRC_l, sorted.
  std::span<const Edge> active_edges(int layer) const { return edges_.at(layer - 1); }
  /// For every node v, N(v) ∩ SRC_l (sorted).
  const std::vector<std::vector<NodeId>>& active_in(int layer) const { return active_in_.at(layer - 1); }

  /// One line per layer: "layer <l> sources=<k> edges=<e> ids=<...>".
  std::string debug_dump() const;

 private:
  ScheduleMode mode_ = ScheduleMode::kLiteral;
  std::vector<std::vector<NodeId>> sources_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::vector<std::vector<NodeId>>> active_in_;
};

struct CoverageReport {
  std::vector<NodeId> reached;
  std::vector<NodeId> unreached;
};

/// Reached = layer-1 sources plus every node that receives a message on some
/// layer.
CoverageReport coverage_report(const Schedule& schedule, const Graph& g);

}  // namespace gir
