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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "gir/graph.hpp"
#include "gir/tape.hpp"

namespace gir::testing {

inline Graph graph_of(std::initializer_list<std::pair<int, int>> pairs, int n, bool bidirected = false) {
  std::vector<Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v});
  return Graph::build(edges, n, bidirected);
}

inline Graph path(int n, bool bidirected = false) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return Graph::build(edges, n, bidirected);
}

/// All-pairs hop distances by repeated relaxation over the edge list; an
/// oracle that shares no code with the BFS under test.
inline std::vector<std::vector<int>> relaxation_distances(const Graph& g) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  const int n = g.node_count();
  std::vector<std::vector<int>> d(n, std::vector<int>(n, kInf));
  for (int s = 0; s < n; ++s) d[s][s] = 0;
  const auto edges = g.edges();
  for (int s = 0; s < n; ++s) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const Edge& e : edges) {
        if (d[s][e.src] + 1 < d[s][e.dst]) {
          d[s][e.dst] = d[s][e.src] + 1;
          changed = true;
        }
      }
    }
  }
  return d;
}

inline DistanceVector oracle_set_distance(const Graph& g, const std::vector<std::vector<int>>& all,
                                          std::span<const NodeId> sources) {
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  DistanceVector out(static_cast<std::size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) {
    int best = kInf;
    for (NodeId s : sources) best = std::min(best, all[s][v]);
    if (best < kInf) out[v] = best;
  }
  return out;
}

/// Largest elementwise relative error between the taped gradient and central
/// differences, |a - n| / max(|a|, |n|, floor).
inline double gradient_error(const std::function<nd::Var(nd::Tape&, std::vector<nd::Var>&)>& loss,
                             const std::vector<nd::Parameter*>& params, double step = 1e-5,
                             double floor = 1e-6) {
  nd::Tape tape;
  std::vector<nd::Var> vars;
  const nd::Var l = loss(tape, vars);
  tape.backward(l);
  std::vector<nd::Tensor> analytic;
  for (nd::Var v : vars) analytic.push_back(tape.grad(v));

  auto eval = [&] {
    nd::Tape t;
    std::vector<nd::Var> unused;
    return t.value(loss(t, unused)).item();
  };
  double worst = 0.0;
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& data = params[p]->value.data;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double keep = data[i];
      data[i] = keep + step;
      const double up = eval();
      data[i] = keep - step;
      const double down = eval();
      data[i] = keep;
      const double numeric = (up - down) / (2 * step);
      const double a = analytic[p].data[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), floor}));
    }
  }
  return worst;
}

}  // namespace gir::testing
