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
#include <span>
#include <string>
#include <vector>

#include "gir/anchors.hpp"
#include "gir/graph.hpp"

namespace gir {

/// round(n * mean_degree) distinct directed edges, uniformly without
/// self-loops.
Graph random_digraph(int n, double mean_degree, std::uint64_t seed);

/// Parent array for a random recursive tree: parent[i] uniform in [0, i).
std::vector<int> random_arm(int size, std::uint64_t seed);

struct Dataset {
  std::string name;
  Graph graph;
  NodeFeatures features;
  LabeledTask task;
};

/// Per-dataset model sizes used by the desk presets.
struct DeskPreset {
  std::string name;  // "email-npc", "europe-nc", "usa-nc", "celegans-lp", "ns-lp", "pb-lp"
  int hidden = 32;
  int anchors = 64;
  int anchor_sets = 8;
};

std::span<const DeskPreset> desk_presets();
const DeskPreset& desk_preset(const std::string& name);

/// Synthetic stand-ins shaped after the six position-aware benchmarks:
///   email-npc    stochastic block model, pair label = same block
///   europe-nc    hub-and-spoke regions, label = region (small)
///   usa-nc       hub-and-spoke regions, label = region (larger)
///   celegans-lp  random geometric graph
///   ns-lp        many small collaboration groups
///   pb-lp        two dense communities with heavy-tailed degrees
/// All are unattributed (ones) and bidirected. Pair tasks carry balanced
/// positives and sampled negatives.
Dataset make_desk_dataset(const std::string& name, std::uint64_t seed);

/// Two mirrored components of hubs, each hub with one pendant leaf.
///   hubs:   label = component side (0 or 1), attribute 0
///   leaves: label = 2 + b for a private random bit b, attribute 2b - 1
/// The attribute view ([1, is_leaf, attr]) carries the leaf signal only; the side is
/// only visible through anchors, which cover the left component. Hub and
/// leaf labels use disjoint classes, so each expert's logits also reveal
/// which kind of node it is looking at.
struct TwoViewFixture {
  Dataset data;
  NodeFeatures attribute_view;
  NodeFeatures structure_view;
  AnchorSet anchors;
};

TwoViewFixture make_two_view_fixture(int hubs_per_side, std::uint64_t seed);

}  // namespace gir
