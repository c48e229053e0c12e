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

#include "gir/anchors.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "gir/error.hpp"
#include "gir/random.hpp"

namespace gir {

const char* anchor_strategy_name(AnchorStrategy s) {
  switch (s) {
    case AnchorStrategy::kGreedyCover: return "greedy-cover";
    case AnchorStrategy::kTopDegree: return "top-degree";
    case AnchorStrategy::kRandom: return "random";
  }
  return "?";
}

AnchorStrategy parse_anchor_strategy(const std::string& name) {
  if (name == "greedy-cover") return AnchorStrategy::kGreedyCover;
  if (name == "top-degree") return AnchorStrategy::kTopDegree;
  if (name == "random") return AnchorStrategy::kRandom;
  throw FormatError("unknown anchor strategy '" + name + "'");
}

AnchorSet select_anchors(const Graph& g, int m, AnchorStrategy strategy, std::uint64_t seed) {
  const int n = g.node_count();
  detail::require(m >= 1, "anchor count must be positive");
  detail::require(m <= n, "anchor count exceeds node count");

  AnchorSet out;
  out.strategy = strategy;
  out.seed = seed;
  out.nodes.reserve(static_cast<std::size_t>(m));

  std::vector<int> degree(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) degree[v] = g.in_degree(v) + g.out_degree(v);
  // Descending degree, ascending id.
  std::vector<NodeId> by_degree(static_cast<std::size_t>(n));
  std::iota(by_degree.begin(), by_degree.end(), 0);
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](NodeId a, NodeId b) { return degree[a] > degree[b]; });

  switch (strategy) {
    case AnchorStrategy::kTopDegree:
      out.nodes.assign(by_degree.begin(), by_degree.begin() + m);
      break;
    case AnchorStrategy::kRandom: {
      std::vector<NodeId> ids(static_cast<std::size_t>(n));
      std::iota(ids.begin(), ids.end(), 0);
      Rng rng(seed);
      shuffle(std::span<NodeId>(ids), rng);
      out.nodes.assign(ids.begin(), ids.begin() + m);
      break;
    }
    case AnchorStrategy::kGreedyCover: {
      std::vector<char> selected(static_cast<std::size_t>(n), 0);
      std::vector<char> covered(static_cast<std::size_t>(n), 0);
      while (static_cast<int>(out.nodes.size()) < m) {
        NodeId pick = -1;
        for (NodeId v : by_degree) {
          if (!selected[v] && !covered[v]) {
            pick = v;
            break;
          }
        }
        if (pick < 0) {
          std::fill(covered.begin(), covered.end(), 0);
          continue;
        }
        selected[pick] = 1;
        covered[pick] = 1;
        for (NodeId u : g.successors(pick)) covered[u] = 1;
        for (NodeId u : g.in_neighbors(pick)) covered[u] = 1;
        out.nodes.push_back(pick);
      }
      break;
    }
  }
  return out;
}

AnchorPartition partition_anchors(const AnchorSet& anchors, int k) {
  const int total = static_cast<int>(anchors.size());
  detail::require(k >= 1, "anchor set count must be positive");
  detail::require(total % k == 0, "anchor count " + std::to_string(total) + " is not divisible by " +
                                      std::to_string(k));
  const int chunk = total / k;
  detail::require(chunk >= 2, "each anchor set must contain more than one node");
  AnchorPartition part;
  for (int i = 0; i < k; ++i) {
    AnchorSet s;
    s.strategy = anchors.strategy;
    s.seed = anchors.seed;
    s.nodes.assign(anchors.nodes.begin() + i * chunk, anchors.nodes.begin() + (i + 1) * chunk);
    part.sets.push_back(std::move(s));
  }
  return part;
}

void write_anchor_file(const std::filesystem::path& path, const AnchorSet& anchors) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write anchor file: " + path.string());
  for (NodeId a : anchors.nodes) out << a << '\n';
}

AnchorSet read_anchor_file(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open anchor file: " + path.string());
  AnchorSet s;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  long long id = 0;
  while (in >> id) {
    if (id < 0 || id >= n) throw FormatError("anchor id out of range: " + std::to_string(id));
    if (seen[id]) throw FormatError("duplicate anchor id: " + std::to_string(id));
    seen[id] = 1;
    s.nodes.push_back(static_cast<NodeId>(id));
  }
  if (!in.eof()) throw FormatError("malformed anchor file: " + path.string());
  return s;
}

}  // namespace gir
