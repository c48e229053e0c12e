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

#include "gir/graph.hpp"
#include "gir/schedule.hpp"

namespace gir {

// Exact, integer-valued realizations of the message-passing functions that
// make a GIR decode shortest-path distances to its anchors. Nothing here is
// learned; the constructions are run on a schedule and compared against BFS.

/// Distance update: keeps `spd` unless the message arrived (ind = 1) while
/// spd is still 0, in which case the distance becomes depth + 1.
int distance_update(int spd, int depth, int ind);

/// 0 at 0, 1 for any positive input.
int to_ind(double x);

/// to_ind(own + mean(neighbors)) per coordinate; an empty neighbor list
/// contributes the zero vector.
std::vector<int> reach_ind_update(std::span<const int> own, const std::vector<std::vector<int>>& neighbors);

struct Mismatch {
  NodeId node = 0;
  int column = 0;  // anchor index; always 0 for set-level checks
  Distance expected;
  Distance got;
};

/// Per-node state after the set-distance construction.
struct SetDistanceCertificate {
  DistanceVector decoded;   // anchors decode to 0 via the anchor flag
  DistanceVector expected;  // multi_source_bfs
  std::vector<int> spd;     // raw coordinate 0 of the final state
  std::vector<int> depth;   // raw depth coordinate
  std::vector<char> anchor_flag;
  std::vector<Mismatch> mismatches;

  bool passed() const { return mismatches.empty(); }
};

/// Per-(node, anchor) state after the per-anchor construction.
struct AnchorDistanceCertificate {
  int node_count = 0;
  int anchor_count = 0;
  std::vector<Distance> decoded;   // row-major n x |anchors|
  std::vector<Distance> expected;  // single-source BFS per anchor
  std::vector<Mismatch> mismatches;

  Distance decoded_at(NodeId v, int k) const { return decoded[static_cast<std::size_t>(v) * anchor_count + k]; }
  Distance expected_at(NodeId v, int k) const { return expected[static_cast<std::size_t>(v) * anchor_count + k]; }
  bool passed() const { return mismatches.empty(); }
};

/// Runs the set-distance construction for `layers` layers and checks every
/// node against multi_source_bfs. Throws InvalidArgument when `layers` is too
/// small, i.e. one more layer would still deliver a first arrival.
SetDistanceCertificate certify_set_distance(const Graph& g, std::span<const NodeId> anchors, int layers,
                                            ScheduleMode mode = ScheduleMode::kBfsShell);

/// Runs the per-anchor construction (anchor one-hot seeded reachability plus
/// one distance update per anchor) and checks the n x |anchors| matrix
/// against single-source BFS from each anchor.
AnchorDistanceCertificate certify_anchor_distances(const Graph& g, std::span<const NodeId> anchors, int layers,
                                                   ScheduleMode mode = ScheduleMode::kLiteral);

/// "verdict=PASS ..." header followed by one "mismatch ..." line per error.
std::string format_report(const SetDistanceCertificate& cert);
std::string format_report(const AnchorDistanceCertificate& cert);

}  // namespace gir
