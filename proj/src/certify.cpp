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

#include "gir/certify.hpp"

#include <algorithm>
#include <sstream>

#include "gir/error.hpp"

namespace gir {

int distance_update(int spd, int depth, int ind) {
  if (ind == 0) return spd;
  return spd == 0 ? depth + 1 : spd;
}

int to_ind(double x) { return x > 0.0 ? 1 : 0; }

std::vector<int> reach_ind_update(std::span<const int> own, const std::vector<std::vector<int>>& neighbors) {
  std::vector<double> mean(own.size(), 0.0);
  for (const auto& nb : neighbors) {
    detail::require(nb.size() == own.size(), "reach_ind_update: indicator width mismatch");
    for (std::size_t j = 0; j < nb.size(); ++j) mean[j] += nb[j];
  }
  std::vector<int> out(own.size());
  for (std::size_t j = 0; j < own.size(); ++j) {
    if (!neighbors.empty()) mean[j] /= static_cast<double>(neighbors.size());
    out[j] = to_ind(own[j] + mean[j]);
  }
  return out;
}

namespace {

void check_anchors(const Graph& g, std::span<const NodeId> anchors, int layers) {
  detail::require(!anchors.empty(), "certification needs at least one anchor");
  detail::require(layers >= 1, "certification needs at least one layer");
  std::vector<char> seen(static_cast<std::size_t>(g.node_count()), 0);
  for (NodeId a : anchors) {
    detail::require(g.valid(a), "anchor id out of range");
    detail::require(!seen[a], "duplicate anchor id");
    seen[a] = 1;
  }
}

[[noreturn]] void too_shallow(int layers) {
  detail::fail("propagation depth " + std::to_string(layers) +
               " is too small: messages still reach new nodes on the next layer");
}

std::string show(const Distance& d) { return d ? std::to_string(*d) : "unreachable"; }

}  // namespace

SetDistanceCertificate certify_set_distance(const Graph& g, std::span<const NodeId> anchors, int layers,
                                            ScheduleMode mode) {
  check_anchors(g, anchors, layers);
  const int n = g.node_count();
  FrontierWalker walker(g, anchors, mode);
  std::vector<char> is_source(static_cast<std::size_t>(n), 0);

  SetDistanceCertificate cert;
  cert.spd.assign(static_cast<std::size_t>(n), 0);
  cert.depth.assign(static_cast<std::size_t>(n), 0);
  cert.anchor_flag.assign(static_cast<std::size_t>(n), 0);
  for (NodeId a : anchors) cert.anchor_flag[a] = 1;

  // The message each node aggregates is the mean of its active in-neighbors'
  // constant channel, so it is nonzero exactly when some source is adjacent.
  auto arrival = [&](NodeId v) {
    double total = 0.0;
    int count = 0;
    for (NodeId u : g.in_neighbors(v)) {
      if (is_source[u]) {
        total += 1.0;
        ++count;
      }
    }
    return to_ind(count == 0 ? 0.0 : total / count);
  };
  auto enter_layer = [&](int l) {
    if (l > 1) {
      for (NodeId u : walker.sources()) is_source[u] = 0;
      walker.advance();
    }
    for (NodeId u : walker.sources()) is_source[u] = 1;
  };

  for (int l = 1; l <= layers; ++l) {
    enter_layer(l);
    std::vector<int> next_spd(cert.spd.size());
    for (NodeId v = 0; v < n; ++v) {
      const int ind = arrival(v);
      next_spd[v] = l == 1 ? distance_update(0, 0, ind) : distance_update(cert.spd[v], cert.depth[v], ind);
    }
    cert.spd = std::move(next_spd);
    for (int& d : cert.depth) d += 1;
  }
  // One extra layer detects an insufficient depth.
  enter_layer(layers + 1);
  for (NodeId v = 0; v < n; ++v) {
    if (!cert.anchor_flag[v] && cert.spd[v] == 0 && arrival(v)) too_shallow(layers);
  }

  cert.expected = multi_source_bfs(g, anchors);
  cert.decoded.resize(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    if (cert.anchor_flag[v]) {
      cert.decoded[v] = 0;
    } else if (cert.spd[v] > 0) {
      cert.decoded[v] = cert.spd[v];
    }
    if (cert.decoded[v] != cert.expected[v]) cert.mismatches.push_back({v, 0, cert.expected[v], cert.decoded[v]});
  }
  return cert;
}

AnchorDistanceCertificate certify_anchor_distances(const Graph& g, std::span<const NodeId> anchors, int layers,
                                                   ScheduleMode mode) {
  check_anchors(g, anchors, layers);
  const int n = g.node_count();
  const int m = static_cast<int>(anchors.size());
  FrontierWalker walker(g, anchors, mode);
  std::vector<char> is_source(static_cast<std::size_t>(n), 0);

  // ind starts as the anchor one-hot labeling carried in the input features.
  // Flat n x m layouts; the update is reach_ind_update unrolled per node.
  const std::size_t cells = static_cast<std::size_t>(n) * m;
  std::vector<int> ind(cells, 0), spd(cells, 0), next(cells, 0);
  std::vector<double> mean(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) ind[static_cast<std::size_t>(anchors[k]) * m + k] = 1;
  int depth = 0;

  auto step_ind = [&](int l) {
    if (l > 1) {
      for (NodeId u : walker.sources()) is_source[u] = 0;
      walker.advance();
    }
    for (NodeId u : walker.sources()) is_source[u] = 1;
    for (NodeId v = 0; v < n; ++v) {
      std::fill(mean.begin(), mean.end(), 0.0);
      int count = 0;
      for (NodeId u : g.in_neighbors(v)) {
        if (!is_source[u]) continue;
        ++count;
        const int* row = &ind[static_cast<std::size_t>(u) * m];
        for (int k = 0; k < m; ++k) mean[k] += row[k];
      }
      const int* own = &ind[static_cast<std::size_t>(v) * m];
      int* out = &next[static_cast<std::size_t>(v) * m];
      const double denom = count == 0 ? 1.0 : static_cast<double>(count);
      for (int k = 0; k < m; ++k) out[k] = to_ind(own[k] + mean[k] / denom);
    }
  };

  for (int l = 1; l <= layers; ++l) {
    step_ind(l);
    std::swap(ind, next);
    for (std::size_t i = 0; i < cells; ++i) spd[i] = distance_update(spd[i], depth, ind[i]);
    ++depth;
  }
  step_ind(layers + 1);
  if (next != ind) too_shallow(layers);

  AnchorDistanceCertificate cert;
  cert.node_count = n;
  cert.anchor_count = m;
  cert.decoded.resize(static_cast<std::size_t>(n) * m);
  cert.expected.resize(static_cast<std::size_t>(n) * m);
  for (int k = 0; k < m; ++k) {
    const NodeId a = anchors[k];
    const std::span<const NodeId> single(&anchors[k], 1);
    const DistanceVector bfs = multi_source_bfs(g, single);
    for (NodeId v = 0; v < n; ++v) {
      const std::size_t idx = static_cast<std::size_t>(v) * m + k;
      cert.expected[idx] = bfs[v];
      if (v == a) {
        cert.decoded[idx] = 0;  // anchor flag on its own column
      } else if (spd[idx] > 0) {
        cert.decoded[idx] = spd[idx];
      }
      if (cert.decoded[idx] != cert.expected[idx]) {
        cert.mismatches.push_back({v, k, cert.expected[idx], cert.decoded[idx]});
      }
    }
  }
  return cert;
}

std::string format_report(const SetDistanceCertificate& cert) {
  std::ostringstream out;
  out << "check=set-distance nodes=" << cert.decoded.size() << " verdict=" << (cert.passed() ? "PASS" : "FAIL")
      << " mismatches=" << cert.mismatches.size() << '\n';
  for (const Mismatch& mm : cert.mismatches) {
    out << "mismatch node=" << mm.node << " expected=" << show(mm.expected) << " got=" << show(mm.got) << '\n';
  }
  return out.str();
}

std::string format_report(const AnchorDistanceCertificate& cert) {
  std::ostringstream out;
  out << "check=anchor-distance nodes=" << cert.node_count << " anchors=" << cert.anchor_count
      << " verdict=" << (cert.passed() ? "PASS" : "FAIL") << " mismatches=" << cert.mismatches.size() << '\n';
  for (const Mismatch& mm : cert.mismatches) {
    out << "mismatch node=" << mm.node << " anchor_index=" << mm.column << " expected=" << show(mm.expected)
        << " got=" << show(mm.got) << '\n';
  }
  return out.str();
}

}  // namespace gir
