//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "divmatch/generators.hpp"
#include "divmatch/queries.hpp"
#include "test_support.hpp"

using namespace divmatch;
namespace dt = divmatch::testing;

TEST(Queries, SimpleQueriesArePathsOrCycles) {
  auto g = gen::random_geometric(500, 6.0, 4, 1);
  auto qs = generate_queries(g, QueryKind::simple, 30, 5, 1);
  ASSERT_EQ(qs.size(), 30u);
  for (const auto &q : qs) {
    EXPECT_LE(q.vertex_count(), 5u);
    for (VertexId v = 0; v < q.vertex_count(); ++v) EXPECT_LE(q.degree(v), 2u);
    EXPECT_GE(q.edge_count() + 1, q.vertex_count());
    EXPECT_LE(q.edge_count(), q.vertex_count());
  }
}

TEST(Queries, EveryQueryOccursInTheGraph) {
  auto g = gen::erdos_renyi(60, 4.0, 3, 2);
  for (auto kind : {QueryKind::simple, QueryKind::common, QueryKind::complex}) {
    for (const auto &q : generate_queries(g, kind, 8, 5, 2)) {
      EXPECT_LE(q.vertex_count(), 5u);
      EXPECT_TRUE(is_connected(q));
      EXPECT_FALSE(dt::brute_force_sets(g, q).empty()) << to_string(kind);
    }
  }
}

TEST(Queries, ComplexQueriesAreDenserAroundACluster) {
  // A geometric graph with a K5 planted on vertices 0..4.
  auto base = gen::random_geometric(300, 4.0, 2, 3);
  auto edges = base.edges();
  for (VertexId u = 0; u < 5; ++u)
    for (VertexId v = u + 1; v < 5; ++v)
      if (!base.has_edge(u, v)) edges.push_back({u, v});
  LabeledGraph g(std::vector<Label>(base.labels().begin(), base.labels().end()), edges);
  std::size_t wins = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 a(seed), b(seed);
    const VertexId start = VertexId(seed % 5);
    auto dense = grow_query(g, QueryKind::complex, start, 8, a);
    auto common = grow_query(g, QueryKind::common, start, 8, b);
    ASSERT_TRUE(dense && common);
    wins += edge_density(*dense) >= edge_density(*common);
  }
  EXPECT_EQ(wins, 50u);
}

TEST(Queries, FailsOnEdgelessGraphs) {
  LabeledGraph g({0, 1, 2}, std::vector<Edge>{});
  EXPECT_THROW(generate_queries(g, QueryKind::simple, 1, 5, 1), GenerationFailed);
  EXPECT_THROW(parse_query_kind("medium"), std::invalid_argument);
}

TEST(Queries, DeterministicUnderSeed) {
  auto g = gen::random_geometric(400, 5.0, 4, 4);
  auto a = generate_queries(g, QueryKind::common, 10, 7, 9);
  auto b = generate_queries(g, QueryKind::common, 10, 7, 9);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(a[i] == b[i]);
}
