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

// Leader selection on the coordination graph.
//
// Starting from no leaders, single nodes flip their leader membership while
// some node gains from flipping. The gain is either the change of the total
// saving f_ce (total gain) or the change of the flipping node's own utility
// when savings are split between follower and leader in a fixed ratio
// (pairwise gain). The flipping node is the one with the largest gain
// (greedy) or a uniformly drawn one among those that gain (random).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "platoon/coordination_graph.hpp"
#include "platoon/error.hpp"
#include "platoon/rng.hpp"

namespace platoon {

enum class GainKind { kTotal, kPairwise };
enum class Selection { kGreedy, kRandom };
enum class Termination { kEquilibrium, kCycleDetected, kCapReached };

inline std::string_view TerminationName(Termination t) {
  switch (t) {
    case Termination::kEquilibrium: return "equilibrium";
    case Termination::kCycleDetected: return "cycle_detected";
    case Termination::kCapReached: return "cap_reached";
  }
  return "unknown";
}

struct ClusteringConfig {
  GainKind gain = GainKind::kTotal;
  Selection selection = Selection::kGreedy;
  double rho_l = 0.5;  // leader share of a pairwise saving (pairwise gain)
  std::uint64_t seed = 0;
  std::size_t max_iterations = 1'000'000;
  bool record_trace = false;

  void Validate() const {
    Require(rho_l > 0.0 && rho_l < 1.0, ErrorKind::kConfigInvalid, "rho_l must lie in (0, 1)");
    Require(max_iterations >= 1, ErrorKind::kConfigInvalid, "max_iterations must be >= 1");
  }
};

inline std::string VariantName(GainKind gain, Selection selection) {
  return std::string(gain == GainKind::kTotal ? "total" : "pairwise") + "-" +
         (selection == Selection::kGreedy ? "greedy" : "random");
}

inline std::string VariantName(const ClusteringConfig& cfg) {
  return VariantName(cfg.gain, cfg.selection);
}

struct IterationRecord {
  std::size_t iteration = 0;
  NodeIndex node = 0;
  double delta_u = 0.0;
  double objective = 0.0;  // f_ce after the flip
};

struct ClusteringResult {
  NodeSet leaders;
  std::vector<std::optional<NodeIndex>> assignment;  // per node; leaders unassigned
  double objective = 0.0;
  std::size_t iterations = 0;
  Termination termination = Termination::kEquilibrium;
  std::vector<std::uint64_t> history_hashes;  // pairwise gain only
  std::vector<IterationRecord> trace;
};

// f_ce: every non-leader contributes its best saving among leaders.
inline double ObjectiveFce(const CoordinationGraph& g, const NodeSet& leaders) {
  double total = 0.0;
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (leaders.Contains(i)) continue;
    if (auto best = BestLeader(g, i, leaders)) total += best->weight;
  }
  return total;
}

inline std::vector<std::optional<NodeIndex>> AssignFollowers(const CoordinationGraph& g,
                                                             const NodeSet& leaders) {
  std::vector<std::optional<NodeIndex>> assignment(g.node_count());
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (leaders.Contains(i)) continue;
    if (auto best = BestLeader(g, i, leaders)) assignment[i] = best->leader;
  }
  return assignment;
}

namespace internal {

// Best-leader lookup strategies for the local gain formulas. ScanLookup reads
// the graph directly; the run loop passes a cache kept in sync with flips.
// Both must return exactly what BestLeader returns.
struct ScanLookup {
  const CoordinationGraph& g;
  const NodeSet& leaders;
  std::optional<LeaderChoice> operator()(NodeIndex i) const { return BestLeader(g, i, leaders); }
};

// Best leader of i when `excluded` is no longer a leader.
inline double BestWeightWithout(const CoordinationGraph& g, NodeIndex i,
                                const NodeSet& leaders, NodeIndex excluded,
                                const std::optional<LeaderChoice>& current) {
  if (!current || current->leader != excluded) return current ? current->weight : 0.0;
  double best = 0.0;
  bool found = false;
  for (const Arc& a : g.out(i)) {
    if (a.node == excluded || !leaders.Contains(a.node)) continue;
    if (!found || a.weight > best) {
      best = a.weight;
      found = true;
    }
  }
  return best;
}

// Change of f_ce when n flips. Terms are summed in ascending node order with
// n's own term at its position, which makes the result identical to summing
// per-node differences of a global recomputation.
template <typename Lookup>
double TotalGain(const CoordinationGraph& g, NodeIndex n, const NodeSet& leaders,
                 const Lookup& lookup) {
  const bool is_leader = leaders.Contains(n);
  double own_term;
  if (is_leader) {
    // n becomes a follower of its best remaining leader, if any.
    double best = 0.0;
    bool found = false;
    for (const Arc& a : g.out(n)) {
      if (a.node == n || !leaders.Contains(a.node)) continue;
      if (!found || a.weight > best) {
        best = a.weight;
        found = true;
      }
    }
    own_term = best - 0.0;
  } else {
    const auto current = lookup(n);
    own_term = 0.0 - (current ? current->weight : 0.0);
  }

  double sum = 0.0;
  bool own_added = false;
  for (const Arc& in_arc : g.in(n)) {
    const NodeIndex i = in_arc.node;
    if (!own_added && n < i) {
      sum += own_term;
      own_added = true;
    }
    if (leaders.Contains(i)) continue;
    const auto current = lookup(i);
    const double before = current ? current->weight : 0.0;
    double after;
    if (is_leader) {
      after = BestWeightWithout(g, i, leaders, n, current);
    } else {
      after = std::max(before, in_arc.weight);
    }
    sum += after - before;
  }
  if (!own_added) sum += own_term;
  return sum;
}

// Would i pick n if n joined the leaders (ties: smallest id)?
inline bool PrefersNewLeader(const std::optional<LeaderChoice>& current, NodeIndex n,
                             double weight) {
  if (!current) return true;
  return weight > current->weight || (weight == current->weight && n < current->leader);
}

// Change of n's own utility when n flips, with savings split rho_l : 1 - rho_l
// between leader and follower.
template <typename Lookup>
double PairwiseGain(const CoordinationGraph& g, NodeIndex n, const NodeSet& leaders,
                    double rho_l, const Lookup& lookup) {
  const double rho_f = 1.0 - rho_l;
  if (leaders.Contains(n)) {
    // u_f(n, L \ {n}) - u_l(n, L)
    double best = 0.0;
    bool found = false;
    for (const Arc& a : g.out(n)) {
      if (!leaders.Contains(a.node)) continue;
      if (!found || a.weight > best) {
        best = a.weight;
        found = true;
      }
    }
    double leader_utility = 0.0;
    for (const Arc& in_arc : g.in(n)) {
      if (leaders.Contains(in_arc.node)) continue;
      const auto current = lookup(in_arc.node);
      if (current && current->leader == n) leader_utility += rho_l * in_arc.weight;
    }
    return rho_f * best - leader_utility;
  }
  // u_l(n, L + {n}) - u_f(n, L)
  double leader_utility = 0.0;
  for (const Arc& in_arc : g.in(n)) {
    if (leaders.Contains(in_arc.node)) continue;
    if (PrefersNewLeader(lookup(in_arc.node), n, in_arc.weight)) {
      leader_utility += rho_l * in_arc.weight;
    }
  }
  const auto current = lookup(n);
  return leader_utility - rho_f * (current ? current->weight : 0.0);
}

}  // namespace internal

// Total gain: f_ce after flipping n minus f_ce before, from n's one- and
// two-hop neighbourhood.
inline double DeltaUTotal(const CoordinationGraph& g, NodeIndex n, const NodeSet& leaders) {
  return internal::TotalGain(g, n, leaders, internal::ScanLookup{g, leaders});
}

// Pairwise gain of n for leader share rho_l.
inline double DeltaUPairwise(const CoordinationGraph& g, NodeIndex n, const NodeSet& leaders,
                             double rho_l) {
  return internal::PairwiseGain(g, n, leaders, rho_l, internal::ScanLookup{g, leaders});
}

namespace internal {

// Leader set plus each non-leader's current best leader, updated per flip.
class ClusterState {
 public:
  explicit ClusterState(const CoordinationGraph& g)
      : g_(g), leaders_(g.node_count()), best_(g.node_count()) {}

  const NodeSet& leaders() const { return leaders_; }
  std::optional<LeaderChoice> operator()(NodeIndex i) const { return best_[i]; }

  void Flip(NodeIndex n) {
    if (leaders_.Contains(n)) {
      leaders_.Erase(n);
      best_[n] = BestLeader(g_, n, leaders_);
      for (const Arc& a : g_.in(n)) {
        if (leaders_.Contains(a.node)) continue;
        if (best_[a.node] && best_[a.node]->leader == n) {
          best_[a.node] = BestLeader(g_, a.node, leaders_);
        }
      }
    } else {
      leaders_.Insert(n);
      best_[n].reset();
      for (const Arc& a : g_.in(n)) {
        if (leaders_.Contains(a.node)) continue;
        if (PrefersNewLeader(best_[a.node], n, a.weight)) {
          best_[a.node] = LeaderChoice{n, a.weight};
        }
      }
    }
  }

 private:
  const CoordinationGraph& g_;
  NodeSet leaders_;
  std::vector<std::optional<LeaderChoice>> best_;
};

inline std::uint64_t Digest(const std::vector<std::uint64_t>& key) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t w : key) h = Mix64(h ^ w);
  return h;
}

}  // namespace internal

inline ClusteringResult RunClustering(const CoordinationGraph& g, const ClusteringConfig& cfg) {
  cfg.Validate();
  const std::size_t k = g.node_count();
  internal::ClusterState state(g);
  Rng rng(cfg.seed);
  ClusteringResult result;

  const bool pairwise = cfg.gain == GainKind::kPairwise;
  std::set<std::vector<std::uint64_t>> visited;
  NodeSet best_leaders = state.leaders();
  double objective = 0.0;  // running f_ce, for trace and best-state tracking
  double best_objective = 0.0;
  if (pairwise) {
    auto key = state.leaders().Key();
    result.history_hashes.push_back(internal::Digest(key));
    visited.insert(std::move(key));
  }

  std::vector<double> gains(k);
  std::vector<NodeIndex> improving;
  result.termination = Termination::kEquilibrium;
  while (true) {
    improving.clear();
    for (NodeIndex n = 0; n < k; ++n) {
      gains[n] = pairwise
                     ? internal::PairwiseGain(g, n, state.leaders(), cfg.rho_l, state)
                     : internal::TotalGain(g, n, state.leaders(), state);
      if (gains[n] > 0.0) improving.push_back(n);
    }
    if (improving.empty()) break;
    if (result.iterations >= cfg.max_iterations) {
      result.termination = Termination::kCapReached;
      break;
    }
    NodeIndex chosen = improving.front();
    if (cfg.selection == Selection::kGreedy) {
      for (NodeIndex n : improving) {
        if (gains[n] > gains[chosen]) chosen = n;
      }
    } else {
      chosen = improving[rng.Index(improving.size())];
    }
    const double objective_change =
        pairwise ? internal::TotalGain(g, chosen, state.leaders(), state) : gains[chosen];
    state.Flip(chosen);
    objective += objective_change;
    ++result.iterations;
    if (cfg.record_trace) {
      result.trace.push_back({result.iterations, chosen, gains[chosen], objective});
    }
    if (pairwise) {
      if (objective > best_objective) {
        best_objective = objective;
        best_leaders = state.leaders();
      }
      auto key = state.leaders().Key();
      result.history_hashes.push_back(internal::Digest(key));
      if (!visited.insert(std::move(key)).second) {
        result.termination = Termination::kCycleDetected;
        break;
      }
    }
  }

  // A cycling run reports the best leader set it visited.
  result.leaders =
      result.termination == Termination::kCycleDetected ? best_leaders : state.leaders();
  result.assignment = AssignFollowers(g, result.leaders);
  result.objective = ObjectiveFce(g, result.leaders);
  return result;
}

// Four-node graph on which greedy pairwise-gain selection with rho_l = 0.45
// revisits a leader set, while total gain converges. Found by random search
// over integer-weighted four-node digraphs.
inline CoordinationGraph LimitCycleWitness() {
  return CoordinationGraph::FromEdges(4, {
                                             {0, 2, 1.0, 0.0},
                                             {0, 3, 8.0, 0.0},
                                             {1, 2, 5.0, 0.0},
                                             {1, 3, 8.0, 0.0},
                                             {2, 0, 10.0, 0.0},
                                             {2, 3, 4.0, 0.0},
                                             {3, 0, 9.0, 0.0},
                                             {3, 2, 10.0, 0.0},
                                         });
}

}  // namespace platoon
