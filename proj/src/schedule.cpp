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

#include "gir/schedule.hpp"

#include <algorithm>
#include <sstream>

#include "gir/error.hpp"

namespace gir {

const char* schedule_mode_name(ScheduleMode mode) {
  return mode == ScheduleMode::kLiteral ? "literal" : "bfs-shell";
}

ScheduleMode parse_schedule_mode(const std::string& name) {
  if (name == "literal") return ScheduleMode::kLiteral;
  if (name == "bfs-shell") return ScheduleMode::kBfsShell;
  throw FormatError("unknown schedule mode '" + name + "' (expected literal or bfs-shell)");
}

FrontierWalker::FrontierWalker(const Graph& g, std::span<const NodeId> anchors, ScheduleMode mode)
    : g_(&g), mode_(mode), sources_(anchors.begin(), anchors.end()) {
  detail::require(!anchors.empty(), "schedule needs at least one anchor");
  for (NodeId a : anchors) detail::require(g.valid(a), "anchor id out of range");
  std::sort(sources_.begin(), sources_.end());
  sources_.erase(std::unique(sources_.begin(), sources_.end()), sources_.end());
  if (mode_ == ScheduleMode::kBfsShell) {
    dist_ = multi_source_bfs(g, sources_);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (!dist_[v]) continue;
      const auto d = static_cast<std::size_t>(*dist_[v]);
      if (shells_.size() <= d) shells_.resize(d + 1);
      shells_[d].push_back(v);
    }
  } else {
    mark_.assign(static_cast<std::size_t>(g.node_count()), 0);
  }
}

void FrontierWalker::advance() {
  ++layer_;
  if (mode_ == ScheduleMode::kBfsShell) {
    const auto d = static_cast<std::size_t>(layer_ - 1);
    sources_ = d < shells_.size() ? shells_[d] : std::vector<NodeId>{};
    return;
  }
  std::vector<NodeId> next;
  for (NodeId u : sources_) {
    for (NodeId v : g_->successors(u)) {
      if (!mark_[v]) {
        mark_[v] = 1;
        next.push_back(v);
      }
    }
  }
  for (NodeId v : next) mark_[v] = 0;
  std::sort(next.begin(), next.end());
  sources_ = std::move(next);
}

Schedule Schedule::build(const Graph& g, std::span<const NodeId> anchors, int layers, ScheduleMode mode) {
  detail::require(layers >= 1, "schedule needs at least one layer");
  FrontierWalker walker(g, anchors, mode);
  Schedule s;
  s.mode_ = mode;
  for (int l = 1; l <= layers; ++l) {
    if (l > 1) walker.advance();
    std::vector<Edge> edges;
    std::vector<std::vector<NodeId>> in(static_cast<std::size_t>(g.node_count()));
    for (NodeId u : walker.sources()) {
      for (NodeId v : g.successors(u)) {
        edges.push_back({u, v});
        in[v].push_back(u);  // sources are sorted, so each list stays sorted
      }
    }
    s.sources_.push_back(walker.sources());
    s.edges_.push_back(std::move(edges));
    s.active_in_.push_back(std::move(in));
  }
  return s;
}

std::string Schedule::debug_dump() const {
  std::ostringstream out;
  out << "schedule mode=" << schedule_mode_name(mode_) << " layers=" << layers() << '\n';
  for (int l = 1; l <= layers(); ++l) {
    out << "layer " << l << " sources=" << sources(l).size() << " edges=" << active_edges(l).size() << " ids=";
    bool first = true;
    for (NodeId v : sources(l)) {
      out << (first ? "" : ",") << v;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

CoverageReport coverage_report(const Schedule& schedule, const Graph& g) {
  std::vector<char> hit(static_cast<std::size_t>(g.node_count()), 0);
  for (NodeId a : schedule.sources(1)) hit[a] = 1;
  for (int l = 1; l <= schedule.layers(); ++l) {
    for (const Edge& e : schedule.active_edges(l)) hit[e.dst] = 1;
  }
  CoverageReport r;
  for (NodeId v = 0; v < g.node_count(); ++v) (hit[v] ? r.reached : r.unreached).push_back(v);
  return r;
}

}  // namespace gir
