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

#include <algorithm>
#include <filesystem>
#include <set>

#include "gir/anchors.hpp"
#include "gir/error.hpp"
#include "gir/generators.hpp"
#include "gir/random.hpp"
#include "test_util.hpp"

namespace gir {
namespace {

using testing::graph_of;

TEST(SelectAnchors, StarCenterFirst) {
  const Graph star = graph_of({{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}, 6, true);
  EXPECT_EQ(select_anchors(star, 1, AnchorStrategy::kGreedyCover, 0).nodes, std::vector<NodeId>{0});
}

TEST(SelectAnchors, TwoTrianglesCoverBoth) {
  const Graph g = graph_of({{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}, 6, true);
  EXPECT_EQ(select_anchors(g, 2, AnchorStrategy::kGreedyCover, 0).nodes, (std::vector<NodeId>{0, 3}));
}

TEST(SelectAnchors, CoverageResetsWhenExhausted) {
  const Graph g = graph_of({{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}}, 6, true);
  // After {0, 3} everything is covered; the reset restarts at the next id.
  EXPECT_EQ(select_anchors(g, 4, AnchorStrategy::kGreedyCover, 0).nodes, (std::vector<NodeId>{0, 3, 1, 4}));
}

TEST(SelectAnchors, GreedyCoverWithAllNodesReturnsAll) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Graph g = random_digraph(60, 3.0, seed);
    auto nodes = select_anchors(g, 60, AnchorStrategy::kGreedyCover, seed).nodes;
    std::sort(nodes.begin(), nodes.end());
    for (int i = 0; i < 60; ++i) EXPECT_EQ(nodes[i], i);
  }
}

TEST(SelectAnchors, TopDegreeOrdersByDegreeThenId) {
  const Graph g = graph_of({{0, 1}, {2, 1}, {3, 1}, {2, 3}, {4, 0}}, 5);
  // total degree: 0:2 1:3 2:2 3:2 4:1
  EXPECT_EQ(select_anchors(g, 3, AnchorStrategy::kTopDegree, 0).nodes, (std::vector<NodeId>{1, 0, 2}));
}

TEST(SelectAnchors, RandomIsSeededAndDistinct) {
  const Graph g = random_digraph(50, 2.0, 1);
  const auto a = select_anchors(g, 10, AnchorStrategy::kRandom, 4);
  EXPECT_EQ(a.nodes, select_anchors(g, 10, AnchorStrategy::kRandom, 4).nodes);
  EXPECT_EQ(std::set<NodeId>(a.nodes.begin(), a.nodes.end()).size(), 10u);
  EXPECT_EQ(a.strategy, AnchorStrategy::kRandom);
}

TEST(SelectAnchors, IndependentOfEdgeOrder) {
  const Graph g = random_digraph(80, 3.0, 9);
  auto edges = g.edges();
  Rng rng(1);
  shuffle(std::span<Edge>(edges), rng);
  const Graph h = Graph::build(edges, 80, false);
  for (auto s : {AnchorStrategy::kGreedyCover, AnchorStrategy::kTopDegree, AnchorStrategy::kRandom}) {
    EXPECT_EQ(select_anchors(g, 12, s, 3).nodes, select_anchors(h, 12, s, 3).nodes);
  }
}

TEST(SelectAnchors, RejectsBadCounts) {
  const Graph g = random_digraph(10, 1.0, 0);
  EXPECT_THROW(select_anchors(g, 0, AnchorStrategy::kGreedyCover, 0), InvalidArgument);
  EXPECT_THROW(select_anchors(g, 11, AnchorStrategy::kTopDegree, 0), InvalidArgument);
}

AnchorSet first(int m) {
  AnchorSet a;
  for (int i = 0; i < m; ++i) a.nodes.push_back(i);
  return a;
}

TEST(PartitionAnchors, EqualContiguousChunks) {
  const auto p = partition_anchors(first(8), 4);
  ASSERT_EQ(p.sets.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(p.sets[k].nodes, (std::vector<NodeId>{2 * k, 2 * k + 1}));
  const auto q = partition_anchors(first(64), 8);
  ASSERT_EQ(q.sets.size(), 8u);
  for (const auto& s : q.sets) EXPECT_EQ(s.size(), 8u);
}

TEST(PartitionAnchors, RejectsBadSplits) {
  EXPECT_THROW(partition_anchors(first(8), 3), InvalidArgument);
  EXPECT_THROW(partition_anchors(first(8), 8), InvalidArgument);
  EXPECT_THROW(partition_anchors(first(8), 0), InvalidArgument);
}

TEST(AnchorFile, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "gir_anchor_roundtrip.txt";
  AnchorSet a;
  a.nodes = {5, 2, 9};
  write_anchor_file(path, a);
  EXPECT_EQ(read_anchor_file(path, 10).nodes, a.nodes);
  EXPECT_THROW(read_anchor_file(path, 6), FormatError);
  std::filesystem::remove(path);
}

TEST(AnchorStrategy, NamesRoundTrip) {
  for (auto s : {AnchorStrategy::kGreedyCover, AnchorStrategy::kTopDegree, AnchorStrategy::kRandom}) {
    EXPECT_EQ(parse_anchor_strategy(anchor_strategy_name(s)), s);
  }
  EXPECT_THROW(parse_anchor_strategy("ga-mpca"), FormatError);
}

}  // namespace
}  // namespace gir
