// Copyright 2026 The Platoon Authors.
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

// Coordination graph: edge (i, j) exists when truck i saves fuel by following
// truck j as its coordination leader; its weight is that saving.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "platoon/error.hpp"
#include "platoon/pairwise_planner.hpp"
#include "platoon/parallel.hpp"
#include "platoon/trucking.hpp"

namespace platoon {

// Graph nodes are truck indices 0..K-1.
using NodeIndex = std::uint32_t;

struct Arc {
  NodeIndex node = 0;
  double weight = 0.0;
};

// Per-edge data kept next to the out-arcs.
struct ArcData {
  double delta_d_start = 0.0;
  double fuel_adapted = 0.0;
};

struct WeightedEdge {
  NodeIndex follower = 0;
  NodeIndex leader = 0;
  double weight = 0.0;
  double delta_d_start = 0.0;
};

class CoordinationGraph {
 public:
  CoordinationGraph() = default;

  // Graph from an explicit edge list; used for fixtures and dumps.
  static CoordinationGraph FromEdges(std::size_t node_count,
                                     const std::vector<WeightedEdge>& edges) {
    CoordinationGraph g(node_count);
    std::vector<std::vector<std::pair<Arc, ArcData>>> rows(node_count);
    for (const auto& e : edges) {
      Require(e.follower < node_count && e.leader < node_count,
              ErrorKind::kInvalidArgument, "edge endpoint outside graph");
      Require(e.follower != e.leader, ErrorKind::kInvalidArgument, "self-loop");
      Require(e.weight > 0.0, ErrorKind::kInvalidArgument, "edge weight must be positive");
      rows[e.follower].push_back({Arc{e.leader, e.weight}, ArcData{e.delta_d_start, 0.0}});
    }
    for (NodeIndex i = 0; i < node_count; ++i) {
      auto& row = rows[i];
      std::sort(row.begin(), row.end(),
                [](const auto& a, const auto& b) { return a.first.node < b.first.node; });
      for (std::size_t k = 1; k < row.size(); ++k) {
        Require(row[k].first.node != row[k - 1].first.node, ErrorKind::kInvalidArgument,
                "duplicate edge");
      }
    }
    g.SetRows(std::move(rows));
    return g;
  }

  std::size_t node_count() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  // Out-neighbours (candidate leaders) of i, ascending by node.
  const std::vector<Arc>& out(NodeIndex i) const { return out_[i]; }
  // In-neighbours (candidate followers) of n, ascending by node.
  const std::vector<Arc>& in(NodeIndex n) const { return in_[n]; }
  const std::vector<ArcData>& out_data(NodeIndex i) const { return out_data_[i]; }

  std::optional<std::size_t> ArcPosition(NodeIndex follower, NodeIndex leader) const {
    const auto& row = out_[follower];
    auto it = std::lower_bound(row.begin(), row.end(), leader,
                               [](const Arc& a, NodeIndex n) { return a.node < n; });
    if (it == row.end() || it->node != leader) return std::nullopt;
    return static_cast<std::size_t>(it - row.begin());
  }

  std::optional<double> Weight(NodeIndex follower, NodeIndex leader) const {
    auto pos = ArcPosition(follower, leader);
    if (!pos) return std::nullopt;
    return out_[follower][*pos].weight;
  }

  // Default-profile fuel of each truck; empty for graphs read from a dump.
  const std::vector<double>& default_fuel() const { return default_fuel_; }

  // Full plan for edge (follower, leader) when plans were retained.
  std::optional<PairwisePlan> Plan(NodeIndex follower, NodeIndex leader) const {
    if (plans_.empty()) return std::nullopt;
    auto pos = ArcPosition(follower, leader);
    if (!pos) return std::nullopt;
    return plans_[follower][*pos];
  }
  bool has_plans() const { return !plans_.empty(); }

  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> all;
    all.reserve(edge_count_);
    for (NodeIndex i = 0; i < out_.size(); ++i) {
      for (std::size_t k = 0; k < out_[i].size(); ++k) {
        all.push_back({i, out_[i][k].node, out_[i][k].weight, out_data_[i][k].delta_d_start});
      }
    }
    return all;
  }

  friend bool operator==(const CoordinationGraph& a, const CoordinationGraph& b) {
    if (a.node_count() != b.node_count() || a.edge_count_ != b.edge_count_) return false;
    for (NodeIndex i = 0; i < a.out_.size(); ++i) {
      if (a.out_[i].size() != b.out_[i].size()) return false;
      for (std::size_t k = 0; k < a.out_[i].size(); ++k) {
        if (a.out_[i][k].node != b.out_[i][k].node ||
            a.out_[i][k].weight != b.out_[i][k].weight ||
            a.out_data_[i][k].delta_d_start != b.out_data_[i][k].delta_d_start) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  friend struct GraphBuilder;

  explicit CoordinationGraph(std::size_t n) : out_(n), out_data_(n), in_(n) {}

  void SetRows(std::vector<std::vector<std::pair<Arc, ArcData>>> rows) {
    edge_count_ = 0;
    for (NodeIndex i = 0; i < rows.size(); ++i) {
      out_[i].reserve(rows[i].size());
      out_data_[i].reserve(rows[i].size());
      for (auto& [arc, data] : rows[i]) {
        out_[i].push_back(arc);
        out_data_[i].push_back(data);
        in_[arc.node].push_back(Arc{i, arc.weight});
        ++edge_count_;
      }
    }
  }

  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<ArcData>> out_data_;
  std::vector<std::vector<Arc>> in_;
  std::vector<std::vector<PairwisePlan>> plans_;
  std::vector<double> default_fuel_;
  std::size_t edge_count_ = 0;
};

struct BuildOptions {
  bool keep_plans = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct GraphBuilder {
  // Trucks must carry ids 0..K-1 in order. Row i holds the plans of truck i
  // as follower; rows are independent, so they are computed in parallel and
  // the result does not depend on the schedule.
  static CoordinationGraph Build(const std::vector<TransportAssignment>& trucks,
                                 const FuelParams& params, const SpeedBand& band,
                                 const BuildOptions& options) {
    const std::size_t k = trucks.size();
    for (std::size_t i = 0; i < k; ++i) {
      Require(trucks[i].truck_id == i, ErrorKind::kInvalidArgument,
              "truck ids must be 0..K-1 in order");
      ValidateAssignment(trucks[i], band);
    }
    CoordinationGraph g(k);
    g.default_fuel_.resize(k);
    for (std::size_t i = 0; i < k; ++i) g.default_fuel_[i] = DefaultFuel(trucks[i], params);

    // Trucks with the same endpoints share a path, so overlaps are computed
    // once per route pair when the number of routes is small.
    std::map<std::pair<NodeId, NodeId>, std::size_t> route_of;
    std::vector<std::size_t> route(k);
    std::vector<std::size_t> representative;
    for (std::size_t i = 0; i < k; ++i) {
      auto [it, inserted] = route_of.try_emplace({trucks[i].start_node, trucks[i].dest_node},
                                                 representative.size());
      if (inserted) representative.push_back(i);
      route[i] = it->second;
    }
    const std::size_t routes = representative.size();
    constexpr std::size_t kMaxCachedRoutes = 512;
    std::vector<std::optional<PathOverlap>> overlap_cache;
    if (routes <= kMaxCachedRoutes) {
      overlap_cache.resize(routes * routes);
      for (std::size_t r0 = 0; r0 < routes; ++r0) {
        for (std::size_t r1 = 0; r1 < routes; ++r1) {
          overlap_cache[r0 * routes + r1] = SharedSubpath(
              trucks[representative[r0]].path, trucks[representative[r1]].path);
        }
      }
    }

    std::vector<std::vector<std::pair<Arc, ArcData>>> rows(k);
    std::vector<std::vector<PairwisePlan>> plan_rows(options.keep_plans ? k : 0);
    ParallelFor(k, options.threads, [&](std::size_t i) {
      const auto& follower = trucks[i];
      for (std::size_t j = 0; j < k; ++j) {
        if (j == i) continue;
        const auto& leader = trucks[j];
        std::optional<PairwisePlan> plan;
        if (!overlap_cache.empty()) {
          plan = AdaptedPlan(leader, follower, overlap_cache[route[j] * routes + route[i]],
                             params, band, g.default_fuel_[i]);
        } else {
          plan = AdaptedPlan(leader, follower, SharedSubpath(leader.path, follower.path),
                             params, band, g.default_fuel_[i]);
        }
        if (!plan) continue;
        rows[i].push_back({Arc{static_cast<NodeIndex>(j), plan->saving()},
                           ArcData{plan->delta_d_start, plan->fuel_adapted}});
        if (options.keep_plans) plan_rows[i].push_back(*plan);
      }
    });
    g.SetRows(std::move(rows));
    g.plans_ = std::move(plan_rows);
    return g;
  }
};

inline CoordinationGraph BuildCoordinationGraph(const std::vector<TransportAssignment>& trucks,
                                                const FuelParams& params,
                                                const SpeedBand& band,
                                                const BuildOptions& options = {}) {
  return GraphBuilder::Build(trucks, params, band, options);
}

// Leader membership over graph nodes.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::size_t universe) : member_(universe, 0) {}
  NodeSet(std::size_t universe, const std::vector<NodeIndex>& nodes) : NodeSet(universe) {
    for (NodeIndex n : nodes) Insert(n);
  }

  std::size_t universe() const { return member_.size(); }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  bool Contains(NodeIndex n) const { return member_[n] != 0; }

  void Insert(NodeIndex n) {
    if (!member_[n]) {
      member_[n] = 1;
      ++size_;
    }
  }
  void Erase(NodeIndex n) {
    if (member_[n]) {
      member_[n] = 0;
      --size_;
    }
  }
  void Toggle(NodeIndex n) { Contains(n) ? Erase(n) : Insert(n); }

  std::vector<NodeIndex> Members() const {
    std::vector<NodeIndex> m;
    m.reserve(size_);
    for (NodeIndex n = 0; n < member_.size(); ++n) {
      if (member_[n]) m.push_back(n);
    }
    return m;
  }

  // Packed membership bits; equal sets give equal keys.
  std::vector<std::uint64_t> Key() const {
    std::vector<std::uint64_t> key((member_.size() + 63) / 64, 0);
    for (std::size_t n = 0; n < member_.size(); ++n) {
      if (member_[n]) key[n / 64] |= std::uint64_t{1} << (n % 64);
    }
    return key;
  }

  friend bool operator==(const NodeSet&, const NodeSet&) = default;

 private:
  std::vector<std::uint8_t> member_;
  std::size_t size_ = 0;
};

struct LeaderChoice {
  NodeIndex leader = 0;
  double weight = 0.0;
};

// Best leader of i among `leaders`: largest saving, smallest id on ties.
// Nothing when i has no out-neighbour in the set (counts as zero saving).
inline std::optional<LeaderChoice> BestLeader(const CoordinationGraph& g, NodeIndex i,
                                              const NodeSet& leaders) {
  std::optional<LeaderChoice> best;
  for (const Arc& a : g.out(i)) {
    if (!leaders.Contains(a.node)) continue;
    if (!best || a.weight > best->weight) best = LeaderChoice{a.node, a.weight};
  }
  return best;
}

// Text dump: a `cnodes <K>` header then one
// `cedge <follower> <leader> <weight> <delta_d_start>` line per edge.
inline void WriteGraphDump(std::ostream& out, const CoordinationGraph& g) {
  const auto old_precision = out.precision(17);
  out << "cnodes " << g.node_count() << '\n';
  for (const auto& e : g.edges()) {
    out << "cedge " << e.follower << ' ' << e.leader << ' ' << e.weight << ' '
        << e.delta_d_start << '\n';
  }
  out.precision(old_precision);
}

inline CoordinationGraph ReadGraphDump(std::istream& in) {
  std::optional<std::size_t> nodes;
  std::vector<WeightedEdge> edges;
  std::size_t max_node = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag.front() == '#') continue;
    const std::string where = "graph line " + std::to_string(line_no);
    if (tag == "cnodes") {
      std::size_t n;
      Require(static_cast<bool>(fields >> n), ErrorKind::kParse, where);
      nodes = n;
    } else if (tag == "cedge") {
      std::uint64_t f, l;
      WeightedEdge e;
      Require(static_cast<bool>(fields >> f >> l >> e.weight), ErrorKind::kParse, where);
      if (!(fields >> e.delta_d_start)) e.delta_d_start = 0.0;
      e.follower = static_cast<NodeIndex>(f);
      e.leader = static_cast<NodeIndex>(l);
      max_node = std::max<std::size_t>(max_node, std::max(f, l) + 1);
      edges.push_back(e);
    } else {
      Fail(ErrorKind::kParse, where + ": unknown record '" + tag + "'");
    }
  }
  const std::size_t k = nodes.value_or(max_node);
  Require(max_node <= k, ErrorKind::kParse, "cedge refers to a node beyond cnodes");
  return CoordinationGraph::FromEdges(k, edges);
}

}  // namespace platoon
