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
#include <string>
#include <vector>

#include "gir/graph.hpp"

namespace gir {

enum class AnchorStrategy { kGreedyCover, kTopDegree, kRandom };

const char* anchor_strategy_name(AnchorStrategy s);
AnchorStrategy parse_anchor_strategy(const std::string& name);

/// Distinct anchor ids in selection order; position k is the anchor's label
/// index for one-hot augmentation.
struct AnchorSet {
  std::vector<NodeId> nodes;
  AnchorStrategy strategy = AnchorStrategy::kGreedyCover;
  std::uint64_t seed = 0;

  std::size_t size() const { return nodes.size(); }
};

/// Disjoint, nonempty, order-preserving chunks of one AnchorSet.
struct AnchorPartition {
  std::vector<AnchorSet> sets;
};

/// greedy-cover: repeatedly take the uncovered node of largest total degree
/// (in + out, ties to the smaller id) and mark it and its undirected 1-hop
/// neighborhood covered; coverage resets once every node is covered.
/// top-degree: the m largest total degrees. random: uniform without replacement.
AnchorSet select_anchors(const Graph& g, int m, AnchorStrategy strategy, std::uint64_t seed);

/// Splits into k contiguous chunks of |anchors| / k, each of size >= 2.
AnchorPartition partition_anchors(const AnchorSet& anchors, int k);

void write_anchor_file(const std::filesystem::path& path, const AnchorSet& anchors);
AnchorSet read_anchor_file(const std::filesystem::path& path, int n);

}  // namespace gir
