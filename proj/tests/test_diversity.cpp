//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "divmatch/diversity.hpp"
#include "divmatch/generators.hpp"
#include "divmatch/graph_io.hpp"
#include "test_support.hpp"

using namespace divmatch;
namespace dt = divmatch::testing;

namespace {

Match single(VertexId v) { return Match::from_mapping({v}, kCrossPartition); }

/// Hub vertex 0 (label 2) touching one end of three A-B edges (1-2, 3-4, 5-6).
/// Every pair of A-B matches is two hops apart through the hub.
LabeledGraph three_spokes() {
  return read_graph(
      "t 7 6\nv 0 2 3\nv 1 0 2\nv 2 1 1\nv 3 0 2\nv 4 1 1\nv 5 0 2\nv 6 1 1\n"
      "e 0 1\ne 0 3\ne 0 5\ne 1 2\ne 3 4\ne 5 6\n");
}

QueryGraph ab_edge() { return QueryGraph(read_graph("t 2 1\nv 0 0 1\nv 1 1 1\ne 0 1\n")); }

/// Set distance by brute force over a Floyd-Warshall table.
long brute_set_distance(const std::vector<std::vector<long>> &fw, const Match &a,
                        const Match &b) {
  long best = -1;
  for (auto u : a.vertex_set)
    for (auto v : b.vertex_set)
      if (fw[u][v] >= 0 && (best < 0 || fw[u][v] < best)) best = fw[u][v];
  return best;
}

std::vector<Match> random_matches(const LabeledGraph &g, std::size_t count, std::size_t size,
                                  std::mt19937_64 &rng) {
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(g.vertex_count() - 1));
  std::vector<Match> out;
  while (out.size() < count) {
    std::set<VertexId> s;
    while (s.size() < size) s.insert(pick(rng));
    out.push_back(Match::from_mapping({s.begin(), s.end()}, kCrossPartition));
  }
  return out;
}

}  // namespace

TEST(SubgraphDistance, OverlapIsZero) {
  auto g = dt::path_graph(5);
  auto a = Match::from_mapping({0, 1, 2}, 0), b = Match::from_mapping({2, 3}, 0);
  EXPECT_EQ(subgraph_distance(g, a, b), HopCount(0));
}

TEST(SubgraphDistance, ThreeSpokeMatchesAreTwoApart) {
  auto g = three_spokes();
  auto ms = oracle_enumerate(g, ab_edge());
  ASSERT_EQ(ms.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) EXPECT_EQ(subgraph_distance(g, ms[i], ms[j]), HopCount(2));
  EXPECT_EQ(distance_diversity(g, ms), SetDistance(HopCount(2)));
}

TEST(SubgraphDistance, AgreesWithAllPairsTableAndIsSymmetric) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto g = gen::erdos_renyi(60, 1.8, 1, seed);
    auto fw = dt::floyd_warshall(g);
    auto ms = random_matches(g, 8, 3, rng);
    for (auto &a : ms)
      for (auto &b : ms) {
        EXPECT_EQ(dt::as_long(subgraph_distance(g, a, b)), brute_set_distance(fw, a, b));
        EXPECT_EQ(subgraph_distance(g, a, b), subgraph_distance(g, b, a));
      }
  }
}

TEST(Coverage, DisjointIdenticalAndRandom) {
  std::vector<Match> disjoint{Match::from_mapping({0, 1}, 0), Match::from_mapping({2, 3}, 0),
                              Match::from_mapping({4, 5}, 0)};
  EXPECT_EQ(coverage(disjoint), 6u);
  std::vector<Match> same{Match::from_mapping({0, 1}, 0), Match::from_mapping({1, 0}, 1)};
  EXPECT_EQ(coverage(same), 2u);
  std::mt19937_64 rng(1);
  auto g = dt::path_graph(40);
  for (int t = 0; t < 20; ++t) {
    auto ms = random_matches(g, 5, 4, rng);
    std::set<VertexId> all;
    for (auto &m : ms) all.insert(m.vertex_set.begin(), m.vertex_set.end());
    EXPECT_EQ(coverage(ms), all.size());
  }
}

TEST(DistanceDiversity, UnboundedBelowTwoMatches) {
  auto g = dt::path_graph(3);
  EXPECT_FALSE(distance_diversity(g, std::vector<Match>{}).has_value());
  EXPECT_FALSE(distance_diversity(g, std::vector<Match>{single(1)}).has_value());
  EXPECT_EQ(to_string(SetDistance{}), "unbounded");
}

TEST(DistanceDiversity, OverlapGivesZeroAndUnreachableRanksHighest) {
  auto g = read_graph("t 4 1\nv 0 0 1\nv 1 0 1\nv 2 0 0\nv 3 0 0\ne 0 1\n");
  std::vector<Match> overlap{Match::from_mapping({0, 1}, 0), single(1), single(3)};
  EXPECT_EQ(distance_diversity(g, overlap), SetDistance(HopCount(0)));
  std::vector<Match> apart{single(0), single(2)};
  EXPECT_EQ(distance_diversity(g, apart), SetDistance(HopCount::unreachable()));
  EXPECT_TRUE(better(SetDistance(HopCount::unreachable()), SetDistance(HopCount(50))));
  EXPECT_TRUE(better(SetDistance{}, SetDistance(HopCount::unreachable())));
}

TEST(DistanceDiversity, PairwiseBruteForceAndMonotonicity) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = gen::erdos_renyi(70, 2.5, 1, seed);
    auto fw = dt::floyd_warshall(g);
    auto ms = random_matches(g, 6, 2, rng);
    std::vector<Match> five(ms.begin(), ms.begin() + 5);
    long best = -2;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = i + 1; j < 5; ++j) {
        long d = brute_set_distance(fw, five[i], five[j]);
        long key = d < 0 ? (1L << 40) : d;
        if (best == -2 || key < best) best = key;
      }
    auto got = distance_diversity(g, five);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(got->reachable() ? long(got->value()) : (1L << 40), best);
    auto more = distance_diversity(g, ms);
    EXPECT_LE(*more, *got);
  }
}

TEST(Oracle, TrianglesInK4) {
  EXPECT_EQ(oracle_enumerate(dt::complete_graph(4), QueryGraph(dt::complete_graph(3))).size(), 4u);
  EXPECT_TRUE(oracle_enumerate(dt::complete_graph(4), QueryGraph(dt::complete_graph(3, 1))).empty());
}

TEST(Oracle, CapExceededSignalsOversizedInstances) {
  OracleLimits limits;
  limits.cap = 3;
  EXPECT_THROW(oracle_enumerate(dt::complete_graph(5), QueryGraph(dt::complete_graph(3)), limits),
               CapExceeded);
  limits = {};
  limits.max_steps = 10;
  EXPECT_THROW(oracle_enumerate(dt::complete_graph(8), QueryGraph(dt::complete_graph(4)), limits),
               CapExceeded);
}

TEST(Oracle, AgreesWithPermutationBruteForce) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    auto g = gen::erdos_renyi(14, 3.5, 2, seed);
    auto q = dt::random_query(3 + seed % 2, seed % 2, 2, rng);
    auto ms = oracle_enumerate(g, q);
    for (const auto &m : ms) EXPECT_TRUE(dt::is_valid_match(g, q, m));
    EXPECT_EQ(dt::vertex_sets(ms), dt::brute_force_sets(g, q));
    EXPECT_EQ(dt::vertex_sets(ms).size(), ms.size());
  }
}

TEST(Selection, WholeSetWhenKEqualsCount) {
  auto g = three_spokes();
  auto ms = oracle_enumerate(g, ab_edge());
  for (auto mode : {SelectMode::exact, SelectMode::greedy_backtrack}) {
    auto sel = oracle_select_topk(g, ms, 3, mode);
    EXPECT_EQ(sel.result.matches.size(), 3u);
    EXPECT_EQ(sel.distance, distance_diversity(g, ms));
  }
}

TEST(Selection, FarthestPairOnAPath) {
  auto g = dt::path_graph(10);
  std::vector<Match> ms{single(0), single(4), single(9)};
  for (auto mode : {SelectMode::exact, SelectMode::greedy_backtrack}) {
    auto sel = oracle_select_topk(g, ms, 2, mode);
    ASSERT_EQ(sel.result.matches.size(), 2u);
    EXPECT_EQ(sel.result.matches[0].vertex_set, std::vector<VertexId>{0});
    EXPECT_EQ(sel.result.matches[1].vertex_set, std::vector<VertexId>{9});
    EXPECT_EQ(sel.distance, SetDistance(HopCount(9)));
  }
}

TEST(Selection, ErrorsAndBudget) {
  auto g = dt::path_graph(30);
  std::vector<Match> ms;
  for (VertexId v = 0; v < 30; ++v) ms.push_back(single(v));
  EXPECT_THROW(oracle_select_topk(g, ms, 31, SelectMode::exact), InsufficientMatches);
  EXPECT_THROW(oracle_select_topk(g, ms, 10, SelectMode::exact, 5), BudgetExceeded);
  // Singletons 0, 3, ..., 27 are pairwise ≥ 3 apart; no ten are 4 apart.
  EXPECT_EQ(oracle_select_topk(g, ms, 10, SelectMode::exact).distance, SetDistance(HopCount(3)));
  EXPECT_EQ(subset_count(30, 10), 30045015.0);
  auto one = oracle_select_topk(g, ms, 1, SelectMode::exact);
  EXPECT_EQ(one.result.matches.size(), 1u);
  EXPECT_FALSE(one.distance.has_value());
}

TEST(Selection, ExactBeatsRandomSubsetsAndGreedyIsClose) {
  std::mt19937_64 rng(77);
  int close = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    auto g = gen::random_connected(60, 20, 1, 1000 + t);
    auto count = std::uniform_int_distribution<int>(5, 15)(rng);
    auto k = std::uniform_int_distribution<int>(2, 4)(rng);
    auto ms = random_matches(g, count, 1 + t % 3, rng);
    auto exact = oracle_select_topk(g, ms, k, SelectMode::exact);
    auto greedy = oracle_select_topk(g, ms, k, SelectMode::greedy_backtrack);
    EXPECT_FALSE(better(greedy.distance, exact.distance));
    auto opt = exact.distance->value();
    if (greedy.distance->value() >= 0.8 * opt) ++close;
    for (int s = 0; s < 5; ++s) {
      std::vector<Match> subset = ms;
      std::shuffle(subset.begin(), subset.end(), rng);
      subset.resize(k);
      EXPECT_FALSE(better(distance_diversity(g, subset), exact.distance));
    }
  }
  EXPECT_GE(close, trials * 9 / 10);
}

TEST(ApproxStats, Arithmetic) {
  auto d = DistanceMatrix::from_rows({{0, 3, 5}, {3, 0, 2}, {5, 2, 0}});
  const PartitionId sel[] = {0, 1, 2};
  auto s = approx_stats(sel, d, HopCount(4), HopCount(5));
  EXPECT_EQ(s.h, HopCount(2));
  EXPECT_DOUBLE_EQ(s.rho, 0.8);
  EXPECT_DOUBLE_EQ(approx_stats(sel, d, HopCount(5), HopCount(5)).rho, 1.0);
  EXPECT_DOUBLE_EQ(approximation_ratio(HopCount(0), HopCount(0)), 1.0);
  EXPECT_DOUBLE_EQ(approximation_ratio(HopCount(3), HopCount::unreachable()), 0.0);
}
