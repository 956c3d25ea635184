//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <set>

#include "divmatch/diversity.hpp"
#include "divmatch/generators.hpp"
#include "divmatch/graph_io.hpp"
#include "divmatch/match.hpp"
#include "divmatch/partition.hpp"
#include "test_support.hpp"

using namespace divmatch;
namespace dt = divmatch::testing;

namespace {

Partition whole(const LabeledGraph &g) {
  std::vector<VertexId> all(g.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  auto ps = PartitionSet::from_groups(g, {g.edges()}, {all});
  return ps[0];
}

QueryGraph triangle(Label l = 0) { return QueryGraph(dt::complete_graph(3, l)); }

}  // namespace

TEST(Candidates, MissingLabelIsEmptyCandidate) {
  auto g = dt::complete_graph(3, 0);
  EXPECT_THROW(build_candidates(triangle(1), whole(g)), EmptyCandidate);
}

TEST(Candidates, TriangleOnTriangle) {
  auto p = whole(dt::complete_graph(3));
  auto cs = build_candidates(triangle(), p);
  for (QueryVertex u = 0; u < 3; ++u) EXPECT_EQ(cs[u], (std::vector<VertexId>{0, 1, 2}));
}

TEST(Candidates, LabelDegreeAndNeighborLabelsFilter) {
  // Query: 0(a) - 1(b). Data: 0(a)-1(a), 2(a)-3(b).
  auto q = QueryGraph(read_graph("t 2 1\nv 0 0 1\nv 1 1 1\ne 0 1\n"));
  auto g = read_graph("t 4 2\nv 0 0 1\nv 1 0 1\nv 2 0 1\nv 3 1 1\ne 0 1\ne 2 3\n");
  auto cs = build_candidates(q, g);
  EXPECT_EQ(cs[0], std::vector<VertexId>{2});
  EXPECT_EQ(cs[1], std::vector<VertexId>{3});
}

TEST(Refinement, StarCenterWithTooFewDistinctNeighbors) {
  auto star = QueryGraph(read_graph(
      "t 4 3\nv 0 0 3\nv 1 1 1\nv 2 1 1\nv 3 1 1\ne 0 1\ne 0 2\ne 0 3\n"));
  auto g = read_graph("t 4 3\nv 0 0 3\nv 1 1 1\nv 2 1 1\nv 3 1 1\ne 0 1\ne 0 2\ne 0 3\n");
  // Only two of the center's neighbors are eligible leaves.
  CandidateSets cs;
  cs.sets = {{0}, {1, 2}, {1, 2}, {1, 2}};
  EXPECT_THROW(refine_semiperfect(star, cs, g), EmptyCandidate);
  cs.sets = {{0}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  EXPECT_EQ(refine_semiperfect(star, cs, g), cs);
}

TEST(Refinement, FixedPointIsIdempotent) {
  auto g = gen::erdos_renyi(120, 4.0, 3, 2);
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto q = dt::random_query(4, 1, 3, rng);
    auto cs = filter_candidates(q, g);
    if (cs.any_empty() || !try_refine_semiperfect(q, cs, g)) continue;
    auto again = cs;
    ASSERT_TRUE(try_refine_semiperfect(q, again, g));
    EXPECT_EQ(again, cs);
  }
}

TEST(Filters, NeverDropAVertexUsedByAnOracleMatch) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto g = gen::erdos_renyi(90, 4.0, 3, seed);
    auto q = dt::random_query(3 + seed % 3, seed % 2, 3, rng);
    auto oracle = oracle_enumerate(g, q);
    auto cs = filter_candidates(q, g);
    bool refined_ok = try_refine_semiperfect(q, cs, g);
    if (!oracle.empty()) ASSERT_TRUE(refined_ok);
    for (const auto &m : oracle)
      for (QueryVertex u = 0; u < q.vertex_count(); ++u)
        EXPECT_TRUE(std::binary_search(cs[u].begin(), cs[u].end(), m.mapping[u]));
    for (QueryVertex u = 0; u < cs.size() && refined_ok; ++u)
      for (auto c : cs[u]) {
        EXPECT_EQ(g.label(c), q.label(u));
        EXPECT_GE(g.degree(c), q.degree(u));
      }
  }
}

TEST(Ordering, ConnectedPermutationStartingAtBestRatio) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    auto q = dt::random_query(2 + t % 8, t % 3, 4, rng);
    CandidateSets cs;
    for (QueryVertex u = 0; u < q.vertex_count(); ++u)
      cs.sets.push_back(std::vector<VertexId>(1 + (u * 7 + t) % 5, 0));
    auto mo = plan_order(q, cs);
    EXPECT_TRUE(mo.connected);
    auto sorted = mo.order;
    std::sort(sorted.begin(), sorted.end());
    for (QueryVertex u = 0; u < q.vertex_count(); ++u) EXPECT_EQ(sorted[u], u);
    for (std::size_t i = 1; i < mo.order.size(); ++i) {
      bool adjacent = false;
      for (std::size_t j = 0; j < i; ++j) adjacent |= q.has_edge(mo.order[i], mo.order[j]);
      EXPECT_TRUE(adjacent);
    }
    auto ratio = [&](QueryVertex u) { return double(cs[u].size()) / q.degree(u); };
    for (QueryVertex u = 0; u < q.vertex_count() && q.vertex_count() > 1; ++u)
      EXPECT_LE(ratio(mo.order[0]), ratio(u));
  }
}

TEST(Ordering, PrefersTheSmallerEstimate) {
  // Star: center 0 with leaves 1, 2, 3. Center goes first (best ratio); the
  // leaf with fewest candidates follows.
  auto q = QueryGraph(read_graph(
      "t 4 3\nv 0 0 3\nv 1 0 1\nv 2 0 1\nv 3 0 1\ne 0 1\ne 0 2\ne 0 3\n"));
  CandidateSets cs;
  cs.sets = {{0, 1, 2}, {0, 1, 2, 3, 4}, {0, 1}, {0, 1, 2, 3}};
  auto mo = plan_order(q, cs);
  EXPECT_EQ(mo.order, (std::vector<QueryVertex>{0, 2, 3, 1}));
}

TEST(IntraEnumeration, TriangleHasSixMappingsOneSet) {
  auto p = whole(dt::complete_graph(3));
  auto q = triangle();
  auto cs = build_candidates(q, p);
  auto mo = plan_order(q, cs);
  auto all = enumerate_intra(q, p, mo, cs);
  EXPECT_EQ(all.size(), 6u);
  EXPECT_EQ(dt::vertex_sets(all).size(), 1u);
  auto first = enumerate_intra(q, p, mo, cs, 1);
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(first[0], all[0]);
  for (const auto &m : all) EXPECT_TRUE(dt::is_valid_match(p.local, q, m));
}

TEST(IntraEnumeration, AgreesWithBruteForceOnRandomPartitions) {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    auto g = gen::erdos_renyi(40, 3.5, 2, seed);
    auto ps = partition_graph(g, {12, 20}, seed);
    auto q = dt::random_query(3 + seed % 2, seed % 2, 2, rng);
    for (const auto &p : ps) {
      auto expected = dt::brute_force_sets(p.local, q);
      std::set<std::vector<VertexId>> got;
      auto cs = filter_candidates(q, p.local);
      if (!cs.any_empty() && try_refine_semiperfect(q, cs, p.local)) {
        auto ms = enumerate_intra(q, p, plan_order(q, cs), cs);
        for (const auto &m : ms) {
          EXPECT_TRUE(dt::is_valid_match(g, q, m));
          EXPECT_EQ(m.home, p.id);
          std::vector<VertexId> local;
          for (auto v : m.vertex_set) local.push_back(*p.to_local(v));
          std::sort(local.begin(), local.end());
          got.insert(local);
        }
      }
      EXPECT_EQ(got, expected) << "seed " << seed << " partition " << p.id;
    }
  }
}

TEST(IntraEnumeration, DeterministicOrder) {
  auto g = gen::erdos_renyi(200, 5.0, 2, 1);
  auto p = whole(g);
  std::mt19937_64 rng(1);
  auto q = dt::random_query(4, 1, 2, rng);
  auto a = intra_search(q, p, 50);
  auto b = intra_search(q, p, 50);
  ASSERT_EQ(a.matches.size(), b.matches.size());
  for (std::size_t i = 0; i < a.matches.size(); ++i) EXPECT_EQ(a.matches[i], b.matches[i]);
  EXPECT_EQ(dt::vertex_sets(a.matches).size(), a.matches.size());
}

TEST(InterEnumeration, StraddlingEdgeFoundWithOneHop) {
  // Path a-b-c split at b; the query is the whole path, so its only match
  // straddles the cut.
  auto g = read_graph("t 3 2\nv 0 0 1\nv 1 1 2\nv 2 2 1\ne 0 1\ne 1 2\n");
  auto ps = PartitionSet::from_groups(g, {{{0, 1}}, {{1, 2}}});
  auto pag = build_pag(ps);
  auto q = QueryGraph(g);
  EXPECT_TRUE(intra_search(q, ps[0], 10).matches.empty());
  std::vector<BoundaryContext> ctx;
  auto ms = enumerate_inter(q, ps, pag, 0, 1, kUnlimited, &ctx);
  ASSERT_EQ(ms.size(), 1u);
  EXPECT_EQ(ms[0].vertex_set, (std::vector<VertexId>{0, 1, 2}));
  EXPECT_TRUE(ms[0].cross_partition());
  ASSERT_EQ(ctx.size(), 1u);
  EXPECT_EQ(ctx[0].origin, 0u);
  EXPECT_EQ(ctx[0].bound_replicas, std::vector<VertexId>{1});
  ASSERT_EQ(ctx[0].frontier.size(), 1u);
  EXPECT_EQ(ctx[0].frontier[0].second, 2u);
  EXPECT_TRUE(enumerate_inter(q, ps, pag, 0, 0).empty());
}

TEST(InterEnumeration, BoundReplicasBelongToTheOrigin) {
  auto g = gen::erdos_renyi(150, 4.0, 2, 9);
  auto ps = partition_graph(g, {15, 30}, 9);
  auto pag = build_pag(ps);
  std::mt19937_64 rng(9);
  auto q = dt::random_query(4, 0, 2, rng);
  for (PartitionId s = 0; s < ps.size(); ++s) {
    std::vector<BoundaryContext> ctx;
    auto ms = enumerate_inter(q, ps, pag, s, 2, 20, &ctx);
    ASSERT_EQ(ms.size(), ctx.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
      EXPECT_TRUE(dt::is_valid_match(g, q, ms[i]));
      EXPECT_FALSE(ctx[i].bound_replicas.empty());
      for (auto v : ctx[i].bound_replicas) EXPECT_TRUE(ps[s].is_replicated(v));
      std::set<PartitionId> owners;
      for (VertexId a = 0; a < q.vertex_count(); ++a)
        for (auto b : q.neighbors(a)) owners.insert(ps.edge_owner(ms[i].mapping[a], ms[i].mapping[b]));
      EXPECT_GE(owners.size(), 2u);
    }
  }
}

TEST(Completeness, IntraUnionInterEqualsWholeGraphOracle) {
  std::mt19937_64 rng(23);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    auto g = gen::erdos_renyi(100, 3.5, 3, 100 + seed);
    auto ps = partition_graph(g, {10, 25}, seed);
    auto pag = build_pag(ps);
    auto budget = std::max<std::uint32_t>(1, pag_distances(pag).diameter());
    auto q = dt::random_query(3 + seed % 3, seed % 2, 3, rng);
    std::set<std::vector<VertexId>> got;
    for (const auto &p : ps) {
      for (const auto &m : intra_search(q, p, kUnlimited).matches) got.insert(m.vertex_set);
      for (const auto &m : enumerate_inter(q, ps, pag, p.id, budget)) got.insert(m.vertex_set);
    }
    EXPECT_EQ(got, dt::vertex_sets(oracle_enumerate(g, q))) << "seed " << seed;
  }
}
