//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <unordered_set>

#include "divmatch/generators.hpp"
#include "divmatch/pipeline.hpp"
#include "divmatch/queries.hpp"
#include "test_support.hpp"

using namespace divmatch;
namespace dt = divmatch::testing;

namespace {

Match at(std::vector<VertexId> mapping, PartitionId home) {
  return Match::from_mapping(std::move(mapping), home);
}

RunConfig small_config(std::size_t k, std::uint64_t seed = 1) {
  RunConfig cfg;
  cfg.k = k;
  cfg.seed = seed;
  cfg.partition_size = {20, 40};
  cfg.sampling.samples = 120;
  cfg.embedding.epochs = 40;
  return cfg;
}

void expect_consistent(const Preprocessed &pre, const QueryGraph &q, const RunReport &r) {
  EXPECT_LE(r.matches.size(), r.k);
  EXPECT_EQ(r.sources.size(), r.matches.size());
  for (const auto &m : r.matches) EXPECT_TRUE(dt::is_valid_match(pre.graph, q, m));
  EXPECT_EQ(distance_diversity(pre.graph, r.matches), r.distance);
  EXPECT_EQ(coverage(r.matches), r.coverage);
  std::set<std::vector<VertexId>> sets;
  for (const auto &m : r.matches) sets.insert(m.vertex_set);
  EXPECT_EQ(sets.size(), r.matches.size());
}

}  // namespace

TEST(Dedup, KeepsLowestPartitionCopy) {
  std::vector<Match> ms{at({3, 4}, 5), at({4, 3}, 2), at({7, 8}, 1)};
  auto out = dedup_matches(ms);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].home, 2u);
  EXPECT_EQ(out[0].mapping, (std::vector<VertexId>{4, 3}));
  EXPECT_EQ(dedup_matches(out), out);
}

TEST(Dedup, CountMatchesIndependentHashing) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<Match> ms;
    for (int i = 0; i < 60; ++i) {
      std::vector<VertexId> mp{VertexId(rng() % 6), VertexId(6 + rng() % 3)};
      if (rng() % 2) std::swap(mp[0], mp[1]);
      ms.push_back(at(mp, PartitionId(rng() % 4)));
    }
    std::unordered_set<std::uint64_t> keys;
    for (const auto &m : ms) keys.insert(std::uint64_t(m.vertex_set[0]) << 32 | m.vertex_set[1]);
    EXPECT_EQ(dedup_matches(ms).size(), keys.size());
  }
}

TEST(Config, Validation) {
  RunConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.k = 1;
  cfg.threads = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.threads = 1;
  cfg.partition_size = {5, 2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(parse_mode("fast"), ConfigError);
}

TEST(RunPdd, NoMatchesGivesEmptyExhaustedResult) {
  auto g = gen::random_geometric(300, 5.0, 3, 1);
  auto pre = preprocess(g, small_config(3));
  // Label 9 does not occur.
  std::vector<Edge> e{{0, 1}};
  QueryGraph q(LabeledGraph({9, 0}, e));
  auto r = run_pdd(pre, q, small_config(3));
  EXPECT_TRUE(r.matches.empty());
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(to_json(r)["status"], "exhausted");
}

TEST(RunPdd, KOneReturnsOneMatch) {
  auto g = gen::random_geometric(300, 5.0, 3, 2);
  auto pre = preprocess(g, small_config(1));
  auto qs = generate_queries(g, QueryKind::simple, 5, 4, 2);
  for (const auto &q : qs) {
    auto r = run_pdd(pre, q, small_config(1));
    ASSERT_EQ(r.matches.size(), 1u);
    EXPECT_TRUE(r.complete);
    EXPECT_FALSE(r.distance.has_value());
    expect_consistent(pre, q, r);
  }
}

TEST(RunPdd, DisjointSourcesGiveFullCoverage) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto g = gen::random_geometric(600, 5.0, 4, seed);
    auto cfg = small_config(4, seed);
    auto pre = preprocess(g, cfg);
    for (const auto &q : generate_queries(g, QueryKind::simple, 5, 4, seed)) {
      auto r = run_pdd(pre, q, cfg);
      expect_consistent(pre, q, r);
      if (!r.complete || !r.h || r.h->value() < 2) continue;
      // Intra matches from pairwise non-adjacent partitions share no vertex.
      bool all_intra = true;
      for (const auto &m : r.matches) all_intra = all_intra && !m.cross_partition();
      if (!all_intra) continue;
      ++checked;
      EXPECT_EQ(r.coverage, cfg.k * q.vertex_count());
      EXPECT_DOUBLE_EQ(r.normalized_coverage, 1.0);
    }
  }
  EXPECT_GT(checked, 5u);
}

TEST(Runs, ReturnExactlyKWheneverTheOracleHasK) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto g = gen::random_geometric(250, 4.0, 3, 50 + seed);
    auto cfg = small_config(6, seed);
    auto pre = preprocess(g, cfg);
    prepare_model(pre, cfg);
    for (auto kind : {QueryKind::simple, QueryKind::common}) {
      for (const auto &q : generate_queries(g, kind, 2, 5, seed)) {
        auto all = oracle_enumerate(g, q);
        const auto expect = std::min(all.size(), cfg.k);
        auto a = run_pdd(pre, q, cfg);
        auto b = run_pddplus(pre, q, cfg);
        EXPECT_EQ(a.matches.size(), expect);
        EXPECT_EQ(b.matches.size(), expect);
        expect_consistent(pre, q, a);
        expect_consistent(pre, q, b);
      }
    }
  }
}

TEST(RunPddPlus, AllNegativeModelFallsBackToDispersion) {
  auto g = gen::random_geometric(400, 6.0, 3, 7);
  auto cfg = small_config(3);
  auto pre = preprocess(g, cfg);
  // One coordinate reads log(1+|V|) − log(1+|E|): positive for path queries,
  // zero for partitions with at least as many edges as vertices.
  OrderEmbeddingModel m(pre.dictionary, 1, 1.0, 1.0, 1.0);
  m.weights()[0] = 1.0;   // vertices
  m.weights()[1] = -1.0;  // edges
  pre.model = m;
  QueryGraph q(dt::path_graph(3, 0));
  std::size_t dominated_parts = 0;
  for (const auto &f : pre.partition_features)
    dominated_parts += f[1] >= f[0];
  ASSERT_EQ(dominated_parts, pre.partitions.size());
  auto r = run_pddplus(pre, q, cfg);
  EXPECT_EQ(r.candidates, 0u);
  EXPECT_NE(std::find(r.rungs.begin(), r.rungs.end(), "dispersion"), r.rungs.end());
  EXPECT_EQ(r.matches.size(), 3u);
}

TEST(RunPddPlus, AllPositiveModelEqualsSelectionOverFullGraph) {
  auto g = gen::random_geometric(600, 5.0, 3, 8);
  auto cfg = small_config(3);
  auto pre = preprocess(g, cfg);
  pre.model = OrderEmbeddingModel(pre.dictionary, 4, 1.0, 1.0, 1.0);  // all zeros
  for (const auto &q : generate_queries(g, QueryKind::simple, 4, 4, 8)) {
    auto r = run_pddplus(pre, q, cfg);
    EXPECT_EQ(r.candidates, pre.partitions.size());
    std::vector<PartitionId> all(pre.partitions.size());
    std::iota(all.begin(), all.end(), 0);
    auto direct = dekps_select(build_pdg(all, pre.distances), cfg.k, [&](PartitionId p) {
      return hybrid_match(q, pre, p, cfg.hop_budget);
    });
    if (direct.matches.size() == cfg.k && dedup_matches(direct.matches).size() == cfg.k) {
      EXPECT_TRUE(r.rungs.empty());
      EXPECT_EQ(r.matches, direct.matches);
    }
  }
}

TEST(RunPddPlus, DictionaryMismatchIsAModelError) {
  auto g = gen::random_geometric(300, 5.0, 3, 9);
  auto cfg = small_config(2);
  auto pre = preprocess(g, cfg);
  pre.model = OrderEmbeddingModel(LabelDictionary(std::vector<Label>{0}), 4, 1.0, 1.0, 1.0);
  QueryGraph q(dt::path_graph(2, 0));
  EXPECT_THROW(run_pddplus(pre, q, cfg), ModelError);
}

TEST(Runs, ThreadCountDoesNotChangeReports) {
  auto g = gen::random_geometric(800, 5.0, 4, 11);
  for (auto mode : {Mode::pdd, Mode::pddplus}) {
    auto one = small_config(5, 3);
    one.mode = mode;
    auto eight = one;
    eight.threads = 8;
    auto pa = preprocess(g, one), pb = preprocess(g, eight);
    for (const auto &q : generate_queries(g, QueryKind::common, 4, 6, 3)) {
      auto a = run(pa, q, one), b = run(pb, q, eight);
      EXPECT_EQ(to_json(a, false).dump(), to_json(b, false).dump());
    }
  }
}

TEST(Oracle, SelfNormalisedColumns) {
  auto g = gen::random_geometric(200, 4.0, 3, 12);
  auto cfg = small_config(3);
  for (const auto &q : generate_queries(g, QueryKind::simple, 3, 4, 12)) {
    auto o = run_oracle(g, q, cfg);
    EXPECT_EQ(o.nd, 1.0);
    EXPECT_EQ(o.nt, 1.0);
    auto copy = o;
    attach_oracle(copy, o);
    EXPECT_EQ(copy.nd, 1.0);
  }
}

TEST(Preprocess, CacheRoundTrip) {
  auto dir = std::filesystem::temp_directory_path() / "divmatch-pipeline-cache";
  std::filesystem::remove_all(dir);
  auto g = gen::random_geometric(300, 5.0, 3, 13);
  auto cfg = small_config(2);
  cfg.cache_dir = dir.string();
  auto a = preprocess(g, cfg);
  auto b = preprocess(g, cfg);
  EXPECT_FALSE(a.cache_hit);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(a.distances, b.distances);
  ASSERT_EQ(a.partitions.size(), b.partitions.size());
  for (PartitionId p = 0; p < a.partitions.size(); ++p)
    EXPECT_EQ(a.partitions[p].edges, b.partitions[p].edges);
  std::filesystem::remove_all(dir);
}
