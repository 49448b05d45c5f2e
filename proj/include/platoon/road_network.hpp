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

// Road network: a weighted directed graph of locations joined by one-way
// segments, plus the path utilities the planner needs (shortest paths,
// along-path distances, overlap of two paths).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "platoon/error.hpp"
#include "platoon/rng.hpp"

namespace platoon {

using NodeId = std::uint32_t;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double EuclideanDistance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class RoadNetwork {
 public:
  NodeId AddNode(Point location) {
    points_.push_back(location);
    out_.emplace_back();
    return static_cast<NodeId>(points_.size() - 1);
  }

  void AddEdge(NodeId from, NodeId to, double weight) {
    Require(HasNode(from) && HasNode(to), ErrorKind::kInvalidArgument,
            "edge endpoint does not exist");
    Require(from != to, ErrorKind::kInvalidArgument, "self-loop edge");
    Require(weight > 0.0 && std::isfinite(weight), ErrorKind::kInvalidArgument,
            "edge weight must be positive and finite");
    Require(!Weight(from, to).has_value(), ErrorKind::kInvalidArgument,
            "duplicate edge");
    auto& list = out_[from];
    const Edge edge{from, to, weight};
    list.insert(std::upper_bound(list.begin(), list.end(), edge,
                                 [](const Edge& a, const Edge& b) {
                                   return a.to < b.to;
                                 }),
                edge);
    ++edge_count_;
  }

  std::size_t node_count() const { return points_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool HasNode(NodeId n) const { return n < points_.size(); }
  const Point& location(NodeId n) const { return points_.at(n); }

  // Outgoing edges of `n`, sorted by head node id.
  const std::vector<Edge>& out_edges(NodeId n) const { return out_.at(n); }

  std::optional<double> Weight(NodeId from, NodeId to) const {
    for (const Edge& e : out_.at(from)) {
      if (e.to == to) return e.weight;
    }
    return std::nullopt;
  }

  // All edges ordered by (from, to).
  std::vector<Edge> edges() const {
    std::vector<Edge> all;
    all.reserve(edge_count_);
    for (const auto& list : out_) all.insert(all.end(), list.begin(), list.end());
    return all;
  }

 private:
  std::vector<Point> points_;
  std::vector<std::vector<Edge>> out_;
  std::size_t edge_count_ = 0;
};

// A sequence of head-to-tail edges with cached prefix lengths.
class Path {
 public:
  Path() = default;

  explicit Path(std::vector<Edge> edges) : edges_(std::move(edges)) {
    Require(!edges_.empty(), ErrorKind::kInvalidArgument, "empty path");
    cumulative_.reserve(edges_.size() + 1);
    cumulative_.push_back(0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (i > 0) {
        Require(edges_[i - 1].to == edges_[i].from,
                ErrorKind::kInvalidArgument, "path edges are not connected");
      }
      Require(edges_[i].weight > 0.0, ErrorKind::kInvalidArgument,
              "path edge weight must be positive");
      total += edges_[i].weight;
      cumulative_.push_back(total);
    }
  }

  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return edges_.size(); }
  bool empty() const { return edges_.empty(); }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  NodeId start() const { return edges_.front().from; }
  NodeId destination() const { return edges_.back().to; }
  double total_length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  // Arc length from the path start to the tail of edge i, i in [0, size()].
  double cumulative(std::size_t i) const { return cumulative_.at(i); }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> seq;
    if (edges_.empty()) return seq;
    seq.reserve(edges_.size() + 1);
    seq.push_back(edges_.front().from);
    for (const Edge& e : edges_) seq.push_back(e.to);
    return seq;
  }

  friend bool operator==(const Path& a, const Path& b) { return a.edges_ == b.edges_; }

 private:
  std::vector<Edge> edges_;
  std::vector<double> cumulative_;
};

// (offset, edge) state of a truck relative to a path.
struct PathPosition {
  std::size_t edge_index = 0;
  double offset = 0.0;

  friend bool operator==(const PathPosition&, const PathPosition&) = default;
};

// Canonical form: an offset at the end of an edge becomes (next edge, 0),
// except on the final edge of the path.
inline PathPosition Normalize(const Path& path, PathPosition pos) {
  Require(pos.edge_index < path.size(), ErrorKind::kInvalidArgument,
          "edge index outside path");
  const double w = path.edge(pos.edge_index).weight;
  Require(pos.offset >= 0.0 && pos.offset <= w, ErrorKind::kInvalidArgument,
          "offset outside edge");
  if (pos.offset == w && pos.edge_index + 1 < path.size()) {
    return PathPosition{pos.edge_index + 1, 0.0};
  }
  return pos;
}

inline double ArcLength(const Path& path, const PathPosition& pos) {
  return path.cumulative(pos.edge_index) + pos.offset;
}

// Canonical position at arc length `arc` (clamped to the path).
inline PathPosition PositionAt(const Path& path, double arc) {
  if (arc <= 0.0) return PathPosition{0, 0.0};
  if (arc >= path.total_length()) {
    return PathPosition{path.size() - 1, path.edges().back().weight};
  }
  std::size_t lo = 0;
  std::size_t hi = path.size();
  // Largest i with cumulative(i) <= arc.
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (path.cumulative(mid) <= arc) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double offset = std::min(arc - path.cumulative(lo), path.edge(lo).weight);
  return Normalize(path, PathPosition{lo, offset});
}

// Along-path distance between two states: |x_b - x_a + sum of the weights
// of edges a.edge_index .. b.edge_index - 1|.
inline double PathDistance(const Path& path, const PathPosition& a,
                           const PathPosition& b) {
  Require(a.edge_index < path.size() && b.edge_index < path.size(),
          ErrorKind::kInvalidArgument, "edge index outside path");
  if (b.edge_index < a.edge_index) {
    Fail(ErrorKind::kOrderViolation, "second position precedes the first");
  }
  double sum = b.offset - a.offset;
  for (std::size_t i = a.edge_index; i < b.edge_index; ++i) {
    sum += path.edge(i).weight;
  }
  return std::abs(sum);
}

namespace internal {

struct QueueEntry {
  double dist;
  NodeId node;
  bool operator>(const QueueEntry& o) const {
    return std::tie(dist, node) > std::tie(o.dist, o.node);
  }
};

using MinQueue =
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

}  // namespace internal

// Dijkstra distance from `from` to `to`; stops early once every remaining
// label exceeds `bound`, returning +inf in that case.
inline double ShortestDistance(const RoadNetwork& net, NodeId from, NodeId to,
                               double bound = std::numeric_limits<double>::infinity()) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(net.node_count(), kInf);
  internal::MinQueue queue;
  dist[from] = 0.0;
  queue.push({0.0, from});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > dist[u]) continue;
    if (d > bound) break;
    if (u == to) return d;
    for (const Edge& e : net.out_edges(u)) {
      const double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        queue.push({nd, e.to});
      }
    }
  }
  return kInf;
}

// Minimum-weight path; among equal-weight paths the lexicographically
// smallest node sequence wins.
inline Path ShortestPath(const RoadNetwork& net, NodeId from, NodeId to) {
  Require(net.HasNode(from) && net.HasNode(to), ErrorKind::kInvalidArgument,
          "unknown node");
  Require(from != to, ErrorKind::kInvalidArgument,
          "shortest path needs distinct endpoints");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = net.node_count();
  std::vector<double> dist(n, kInf);
  std::vector<std::vector<NodeId>> route(n);
  std::vector<bool> settled(n, false);
  internal::MinQueue queue;
  dist[from] = 0.0;
  route[from] = {from};
  queue.push({0.0, from});
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (settled[u] || d > dist[u]) continue;
    settled[u] = true;
    if (u == to) break;
    for (const Edge& e : net.out_edges(u)) {
      if (settled[e.to]) continue;
      const double nd = d + e.weight;
      if (nd < dist[e.to]) {
        dist[e.to] = nd;
        route[e.to] = route[u];
        route[e.to].push_back(e.to);
        queue.push({nd, e.to});
      } else if (nd == dist[e.to]) {
        std::vector<NodeId> candidate = route[u];
        candidate.push_back(e.to);
        if (candidate < route[e.to]) route[e.to] = std::move(candidate);
      }
    }
  }
  if (!settled[to]) {
    Fail(ErrorKind::kUnreachable, "no path from " + std::to_string(from) +
                                      " to " + std::to_string(to));
  }
  std::vector<Edge> edges;
  const auto& seq = route[to];
  edges.reserve(seq.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    edges.push_back(Edge{seq[i], seq[i + 1], *net.Weight(seq[i], seq[i + 1])});
  }
  return Path(std::move(edges));
}

// True when every node reaches every other node.
inline bool IsStronglyConnected(const RoadNetwork& net) {
  const std::size_t n = net.node_count();
  if (n == 0) return true;
  auto reach_all = [n](const std::vector<std::vector<NodeId>>& adj) {
    std::vector<bool> seen(n, false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (NodeId v : adj[u]) {
        if (!seen[v]) {
          seen[v] = true;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };
  std::vector<std::vector<NodeId>> fwd(n), rev(n);
  for (NodeId u = 0; u < n; ++u) {
    for (const Edge& e : net.out_edges(u)) {
      fwd[u].push_back(e.to);
      rev[e.to].push_back(u);
    }
  }
  return reach_all(fwd) && reach_all(rev);
}

struct NetworkParams {
  std::size_t num_locations = 100;
  double side_length = 800.0;
  double detour_factor = 1.5;
};

// Random planar highway network. Locations are uniform in the square
// [0, side]^2; location pairs are visited by increasing Euclidean distance
// and joined by a two-way segment unless a path of at most
// detour_factor * distance already links them.
inline RoadNetwork GenerateRandomNetwork(const NetworkParams& params,
                                         std::uint64_t seed) {
  Require(params.num_locations >= 2, ErrorKind::kInvalidArgument,
          "need at least two locations");
  Require(params.side_length > 0.0, ErrorKind::kInvalidArgument,
          "side length must be positive");
  Require(params.detour_factor > 1.0, ErrorKind::kInvalidArgument,
          "detour factor must exceed 1");
  Rng rng(seed);
  RoadNetwork net;
  for (std::size_t i = 0; i < params.num_locations; ++i) {
    const double x = rng.Uniform(0.0, params.side_length);
    const double y = rng.Uniform(0.0, params.side_length);
    net.AddNode(Point{x, y});
  }
  struct Candidate {
    double dist;
    NodeId a;
    NodeId b;
  };
  std::vector<Candidate> pairs;
  const auto n = static_cast<NodeId>(params.num_locations);
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      pairs.push_back({EuclideanDistance(net.location(a), net.location(b)), a, b});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& l, const Candidate& r) {
    return std::tie(l.dist, l.a, l.b) < std::tie(r.dist, r.a, r.b);
  });
  for (const Candidate& c : pairs) {
    const double limit = params.detour_factor * c.dist;
    if (ShortestDistance(net, c.a, c.b, limit) <= limit) continue;
    net.AddEdge(c.a, c.b, c.dist);
    net.AddEdge(c.b, c.a, c.dist);
  }
  Require(IsStronglyConnected(net), ErrorKind::kUnreachable,
          "generated network is not strongly connected");
  return net;
}

// Contiguous run of edges shared by two paths. F is the tail of the first
// shared edge and L the head of the last one.
struct PathOverlap {
  PathPosition first_on_p0;
  PathPosition first_on_p1;
  PathPosition last_on_p0;
  PathPosition last_on_p1;
  std::size_t first_edge_p0 = 0;
  std::size_t first_edge_p1 = 0;
  std::size_t edge_count = 0;
  double shared_length = 0.0;
};

inline std::optional<PathOverlap> SharedSubpath(const Path& p0, const Path& p1) {
  // p0 index of every p1 edge that also lies on p0.
  std::vector<std::pair<std::size_t, std::size_t>> common;
  for (std::size_t j = 0; j < p1.size(); ++j) {
    const Edge& e = p1.edge(j);
    for (std::size_t i = 0; i < p0.size(); ++i) {
      const Edge& f = p0.edge(i);
      if (f.from == e.from && f.to == e.to) {
        common.emplace_back(i, j);
        break;
      }
    }
  }
  if (common.empty()) return std::nullopt;
  for (std::size_t k = 1; k < common.size(); ++k) {
    if (common[k].first != common[k - 1].first + 1 ||
        common[k].second != common[k - 1].second + 1) {
      Fail(ErrorKind::kOverlapNotContiguous,
           "shared edges of the two paths do not form a single path");
    }
  }
  PathOverlap overlap;
  overlap.first_edge_p0 = common.front().first;
  overlap.first_edge_p1 = common.front().second;
  overlap.edge_count = common.size();
  const std::size_t last0 = common.back().first;
  const std::size_t last1 = common.back().second;
  overlap.first_on_p0 = PathPosition{overlap.first_edge_p0, 0.0};
  overlap.first_on_p1 = PathPosition{overlap.first_edge_p1, 0.0};
  overlap.last_on_p0 = Normalize(p0, PathPosition{last0, p0.edge(last0).weight});
  overlap.last_on_p1 = Normalize(p1, PathPosition{last1, p1.edge(last1).weight});
  double shared = 0.0;
  for (std::size_t j = overlap.first_edge_p1; j <= last1; ++j) {
    shared += p1.edge(j).weight;
  }
  overlap.shared_length = shared;
  return overlap;
}

// Text format: `node <id> <x> <y>` and `edge <from> <to> <weight>` lines.
inline void WriteNetwork(std::ostream& out, const RoadNetwork& net) {
  const auto old_precision = out.precision(17);
  for (NodeId n = 0; n < net.node_count(); ++n) {
    out << "node " << n << ' ' << net.location(n).x << ' ' << net.location(n).y << '\n';
  }
  for (const Edge& e : net.edges()) {
    out << "edge " << e.from << ' ' << e.to << ' ' << e.weight << '\n';
  }
  out.precision(old_precision);
}

inline RoadNetwork ReadNetwork(std::istream& in) {
  RoadNetwork net;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string tag;
    if (!(fields >> tag) || tag.front() == '#') continue;
    const std::string where = "network line " + std::to_string(line_no);
    if (tag == "node") {
      std::uint64_t id;
      Point p;
      Require(static_cast<bool>(fields >> id >> p.x >> p.y), ErrorKind::kParse, where);
      Require(id == net.node_count(), ErrorKind::kParse,
              where + ": node ids must be consecutive from 0");
      net.AddNode(p);
    } else if (tag == "edge") {
      std::uint64_t from, to;
      double w;
      Require(static_cast<bool>(fields >> from >> to >> w), ErrorKind::kParse, where);
      Require(from < net.node_count() && to < net.node_count(), ErrorKind::kParse,
              where + ": unknown node");
      net.AddEdge(static_cast<NodeId>(from), static_cast<NodeId>(to), w);
    } else {
      Fail(ErrorKind::kParse, where + ": unknown record '" + tag + "'");
    }
  }
  return net;
}

}  // namespace platoon
