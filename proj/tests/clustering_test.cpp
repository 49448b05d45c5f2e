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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include "platoon/clustering.hpp"
#include "test_support.hpp"

namespace platoon {
namespace {

// Per-node contribution to f_ce, straight from the definition.
std::vector<double> Contributions(const CoordinationGraph& g, const NodeSet& leaders) {
  std::vector<double> c(g.node_count(), 0.0);
  for (NodeIndex i = 0; i < g.node_count(); ++i) {
    if (leaders.Contains(i)) continue;
    bool found = false;
    for (NodeIndex j = 0; j < g.node_count(); ++j) {
      const auto w = g.Weight(i, j);
      if (!w || !leaders.Contains(j)) continue;
      if (!found || *w > c[i]) c[i] = *w;
      found = true;
    }
  }
  return c;
}

double DoubleLoopObjective(const CoordinationGraph& g, const NodeSet& leaders) {
  double total = 0.0;
  for (double c : Contributions(g, leaders)) total += c;
  return total;
}

NodeSet Flipped(NodeSet s, NodeIndex n) {
  s.Toggle(n);
  return s;
}

// Utility of n under the pairwise split, recomputed over the whole graph.
double Utility(const CoordinationGraph& g, NodeIndex n, const NodeSet& leaders, double rho_l) {
  const auto assignment = AssignFollowers(g, leaders);
  if (leaders.Contains(n)) {
    double u = 0.0;
    for (NodeIndex i = 0; i < g.node_count(); ++i) {
      if (assignment[i] == n) u += rho_l * *g.Weight(i, n);
    }
    return u;
  }
  return (1.0 - rho_l) * Contributions(g, leaders)[n];
}

CoordinationGraph TwoNodeFixture() { return CoordinationGraph::FromEdges(2, {{0, 1, 5.0, 0.0}}); }

TEST(ObjectiveFceTest, Examples) {
  const auto g = TwoNodeFixture();
  EXPECT_EQ(ObjectiveFce(g, NodeSet(2)), 0.0);
  EXPECT_EQ(ObjectiveFce(g, NodeSet(2, {1})), 5.0);
  EXPECT_EQ(ObjectiveFce(g, NodeSet(2, {0, 1})), 0.0);
}

TEST(ObjectiveFceTest, MatchesDoubleLoop) {
  Rng rng(51);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng.Index(20);
    const auto g = testing::RandomGraph(k, rng.Uniform(0.05, 0.8), rng, trial % 2 == 0);
    const NodeSet leaders = testing::RandomSubset(k, rng, rng.Uniform01());
    EXPECT_EQ(ObjectiveFce(g, leaders), DoubleLoopObjective(g, leaders));
  }
}

TEST(DeltaUTotalTest, Examples) {
  const auto g = CoordinationGraph::FromEdges(3, {{0, 1, 5.0, 0.0}});
  EXPECT_EQ(DeltaUTotal(g, 2, NodeSet(3)), 0.0);
  EXPECT_EQ(DeltaUTotal(g, 2, NodeSet(3, {2})), 0.0);
  EXPECT_EQ(DeltaUTotal(g, 1, NodeSet(3)), 5.0);
  EXPECT_EQ(DeltaUTotal(g, 1, NodeSet(3, {1})), -5.0);
  EXPECT_EQ(DeltaUTotal(g, 0, NodeSet(3, {1})), -5.0);
}

TEST(DeltaUTotalTest, EqualsGlobalRecomputation) {
  Rng rng(53);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng.Index(25);
    const auto g = testing::RandomGraph(k, rng.Uniform(0.05, 0.7), rng, trial % 3 == 0);
    const NodeSet leaders = testing::RandomSubset(k, rng, rng.Uniform01());
    const auto before = Contributions(g, leaders);
    const double f_before = DoubleLoopObjective(g, leaders);
    for (NodeIndex n = 0; n < k; ++n) {
      const NodeSet after_set = Flipped(leaders, n);
      const auto after = Contributions(g, after_set);
      // Same terms, same order: bit-identical.
      double per_node = 0.0;
      for (NodeIndex i = 0; i < k; ++i) per_node += after[i] - before[i];
      const double local = DeltaUTotal(g, n, leaders);
      EXPECT_EQ(local, per_node) << "trial " << trial << " node " << n;
      // Difference of the two sums rounds differently.
      const double f_after = DoubleLoopObjective(g, after_set);
      EXPECT_NEAR(local, f_after - f_before, 1e-12 * std::max(1.0, f_before + f_after));
    }
  }
}

TEST(DeltaUPairwiseTest, Examples) {
  const auto g = CoordinationGraph::FromEdges(3, {{0, 1, 5.0, 0.0}});
  EXPECT_EQ(DeltaUPairwise(g, 2, NodeSet(3), 0.5), 0.0);
  EXPECT_EQ(DeltaUPairwise(g, 2, NodeSet(3, {2}), 0.5), 0.0);
  EXPECT_EQ(DeltaUPairwise(g, 1, NodeSet(3), 0.5), 2.5);
  EXPECT_EQ(DeltaUPairwise(g, 0, NodeSet(3, {1}), 0.5), -2.5);
}

TEST(DeltaUPairwiseTest, EqualsDefinitionRecomputedGlobally) {
  Rng rng(57);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + rng.Index(20);
    // Integer weights make the smallest-id tie rule matter.
    const auto g = testing::RandomGraph(k, rng.Uniform(0.05, 0.7), rng, trial % 2 == 0);
    const NodeSet leaders = testing::RandomSubset(k, rng, rng.Uniform01());
    const double rho_l = rng.Uniform(0.05, 0.95);
    for (NodeIndex n = 0; n < k; ++n) {
      const double expected =
          Utility(g, n, Flipped(leaders, n), rho_l) - Utility(g, n, leaders, rho_l);
      EXPECT_EQ(DeltaUPairwise(g, n, leaders, rho_l), expected)
          << "trial " << trial << " node " << n;
    }
  }
}

TEST(RunClusteringTest, EmptyGraph) {
  const auto g = CoordinationGraph::FromEdges(5, {});
  for (GainKind gain : {GainKind::kTotal, GainKind::kPairwise}) {
    ClusteringConfig cfg;
    cfg.gain = gain;
    const auto r = RunClustering(g, cfg);
    EXPECT_TRUE(r.leaders.empty());
    EXPECT_EQ(r.iterations, 0u);
    EXPECT_EQ(r.termination, Termination::kEquilibrium);
  }
}

TEST(RunClusteringTest, TwoNodeFixture) {
  ClusteringConfig cfg;
  cfg.record_trace = true;
  const auto r = RunClustering(TwoNodeFixture(), cfg);
  EXPECT_EQ(r.leaders.Members(), (std::vector<NodeIndex>{1}));
  EXPECT_EQ(r.objective, 5.0);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.termination, Termination::kEquilibrium);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace[0].node, 1u);
  EXPECT_EQ(r.trace[0].delta_u, 5.0);
  EXPECT_EQ(r.assignment[0], NodeIndex{1});
  EXPECT_FALSE(r.assignment[1]);
}

TEST(RunClusteringTest, GreedyTiesGoToSmallestId) {
  // Nodes 1 and 2 both gain 4 by leading node 0.
  const auto g = CoordinationGraph::FromEdges(3, {{0, 1, 4.0, 0.0}, {0, 2, 4.0, 0.0}});
  const auto r = RunClustering(g, ClusteringConfig{});
  EXPECT_EQ(r.leaders.Members(), (std::vector<NodeIndex>{1}));
}

TEST(RunClusteringTest, TotalGreedyReachesOneFlipLocalOptimum) {
  Rng rng(61);
  double worst_ratio = 1.0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = 2 + rng.Index(11);
    const auto g = testing::RandomGraph(k, rng.Uniform(0.1, 0.6), rng, trial % 2 == 0);
    ClusteringConfig cfg;
    cfg.record_trace = true;
    const auto r = RunClustering(g, cfg);
    ASSERT_EQ(r.termination, Termination::kEquilibrium);
    const double f = DoubleLoopObjective(g, r.leaders);
    EXPECT_EQ(r.objective, f);
    for (NodeIndex n = 0; n < k; ++n) {
      EXPECT_LE(DoubleLoopObjective(g, Flipped(r.leaders, n)), f + 1e-12 * std::max(1.0, f));
    }
    // Monotone ascent along the trace.
    double prev = 0.0;
    for (const auto& rec : r.trace) {
      EXPECT_GT(rec.delta_u, 0.0);
      EXPECT_GT(rec.objective, prev);
      prev = rec.objective;
    }
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      NodeSet s(k);
      for (NodeIndex n = 0; n < k; ++n) {
        if (mask >> n & 1u) s.Insert(n);
      }
      best = std::max(best, DoubleLoopObjective(g, s));
    }
    EXPECT_LE(f, best);
    if (best > 0.0) worst_ratio = std::min(worst_ratio, f / best);
  }
  RecordProperty("worst_ratio_to_exhaustive_optimum", std::to_string(worst_ratio));
  std::cout << "greedy / exhaustive optimum, worst ratio: " << worst_ratio << '\n';
}

TEST(RunClusteringTest, ResultInvariantsAcrossVariants) {
  Rng rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.Index(30);
    const auto g = testing::RandomGraph(k, rng.Uniform(0.05, 0.5), rng, trial % 2 == 0);
    for (GainKind gain : {GainKind::kTotal, GainKind::kPairwise}) {
      for (Selection sel : {Selection::kGreedy, Selection::kRandom}) {
        ClusteringConfig cfg;
        cfg.gain = gain;
        cfg.selection = sel;
        cfg.seed = 1000 + trial;
        cfg.rho_l = rng.Uniform(0.2, 0.8);
        const auto r = RunClustering(g, cfg);
        EXPECT_EQ(r.objective, DoubleLoopObjective(g, r.leaders));
        for (NodeIndex i = 0; i < k; ++i) {
          if (!r.assignment[i]) continue;
          EXPECT_FALSE(r.leaders.Contains(i));
          EXPECT_TRUE(r.leaders.Contains(*r.assignment[i]));
          EXPECT_TRUE(g.Weight(i, *r.assignment[i]));
        }
        if (g.edge_count() > 0) {
          EXPECT_FALSE(r.leaders.empty()) << VariantName(cfg);
          EXPECT_LT(r.leaders.size(), k) << VariantName(cfg);
        }
        if (gain == GainKind::kTotal) {
          EXPECT_EQ(r.termination, Termination::kEquilibrium);
          EXPECT_TRUE(r.history_hashes.empty());
        } else {
          EXPECT_EQ(r.history_hashes.size(), r.iterations + 1);
        }
      }
    }
  }
}

TEST(RunClusteringTest, DeterministicGivenSeed) {
  Rng rng(71);
  const auto g = testing::RandomGraph(40, 0.2, rng);
  for (GainKind gain : {GainKind::kTotal, GainKind::kPairwise}) {
    for (Selection sel : {Selection::kGreedy, Selection::kRandom}) {
      ClusteringConfig cfg;
      cfg.gain = gain;
      cfg.selection = sel;
      cfg.seed = 99;
      cfg.record_trace = true;
      const auto a = RunClustering(g, cfg);
      const auto b = RunClustering(g, cfg);
      EXPECT_EQ(a.leaders, b.leaders);
      EXPECT_EQ(a.objective, b.objective);
      EXPECT_EQ(a.iterations, b.iterations);
      EXPECT_EQ(a.history_hashes, b.history_hashes);
      ASSERT_EQ(a.trace.size(), b.trace.size());
      for (std::size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i].node, b.trace[i].node);
    }
  }
}

TEST(RunClusteringTest, CapReached) {
  Rng rng(73);
  const auto g = testing::RandomGraph(30, 0.3, rng);
  ClusteringConfig cfg;
  cfg.max_iterations = 2;
  const auto r = RunClustering(g, cfg);
  EXPECT_EQ(r.termination, Termination::kCapReached);
  EXPECT_EQ(r.iterations, 2u);
}

TEST(RunClusteringTest, RejectsBadConfig) {
  ClusteringConfig cfg;
  cfg.rho_l = 1.0;
  EXPECT_THROW(RunClustering(TwoNodeFixture(), cfg), Error);
  cfg.rho_l = 0.5;
  cfg.max_iterations = 0;
  EXPECT_THROW(RunClustering(TwoNodeFixture(), cfg), Error);
}

TEST(LimitCycleWitnessTest, PairwiseGreedyCycles) {
  const auto g = LimitCycleWitness();
  ClusteringConfig cfg;
  cfg.gain = GainKind::kPairwise;
  cfg.rho_l = 0.45;
  const auto r = RunClustering(g, cfg);
  EXPECT_EQ(r.termination, Termination::kCycleDetected);
  // The repeated set closes the history.
  const auto& h = r.history_hashes;
  ASSERT_GE(h.size(), 3u);
  EXPECT_NE(std::find(h.begin(), h.end() - 1, h.back()), h.end() - 1);
}

TEST(LimitCycleWitnessTest, TotalGainConverges) {
  const auto r = RunClustering(LimitCycleWitness(), ClusteringConfig{});
  EXPECT_EQ(r.termination, Termination::kEquilibrium);
}

TEST(LimitCycleWitnessTest, ReversedRatioIsRecorded) {
  ClusteringConfig cfg;
  cfg.gain = GainKind::kPairwise;
  cfg.rho_l = 0.55;
  const auto r = RunClustering(LimitCycleWitness(), cfg);
  RecordProperty("reversed_ratio_termination", std::string(TerminationName(r.termination)));
  std::cout << "rho_l = 0.55: " << TerminationName(r.termination) << " after " << r.iterations
            << " iterations\n";
}

}  // namespace
}  // namespace platoon
