//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divmatch/diversity.hpp"
#include "divmatch/embedding.hpp"
#include "divmatch/features.hpp"
#include "divmatch/graph_io.hpp"
#include "divmatch/match.hpp"
#include "divmatch/parallel.hpp"
#include "divmatch/partition.hpp"
#include "divmatch/partition_io.hpp"
#include "divmatch/select.hpp"

namespace divmatch {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Mode { pdd, pddplus, oracle };

inline const char *to_string(Mode m) {
  switch (m) {
    case Mode::pdd: return "pdd";
    case Mode::pddplus: return "pddplus";
    case Mode::oracle: return "oracle";
  }
  return "?";
}

inline Mode parse_mode(const std::string &s) {
  if (s == "pdd") return Mode::pdd;
  if (s == "pddplus") return Mode::pddplus;
  if (s == "oracle") return Mode::oracle;
  throw ConfigError("unknown mode '" + s + "'");
}

inline constexpr int kReportSchemaVersion = 1;

struct RunConfig {
  Mode mode = Mode::pdd;
  std::size_t k = 10;
  TargetSize partition_size;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::uint32_t hop_budget = 2;
  std::string model_path;  ///< pddplus: loaded if present, written after auto-training
  std::string cache_dir;   ///< partition cache; empty disables it
  double tolerance = 0.0;  ///< predict_contains tolerance
  DekpsPick dekps_pick = DekpsPick::lightest_edge;
  EmbeddingConfig embedding;
  SamplingConfig sampling;
  OracleLimits oracle_limits{200'000, 50'000'000};
  double exact_budget = kDefaultExactBudget;

  void validate() const {
    if (k == 0) throw ConfigError("k must be at least 1");
    if (threads == 0) throw ConfigError("thread budget must be at least 1");
    if (tolerance < 0) throw ConfigError("tolerance must be nonnegative");
    try {
      partition_size.validate();
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  }
};

/// Milliseconds since `start`.
inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

struct PhaseTimes {
  // offline
  double partition_ms = 0;
  double distances_ms = 0;
  double features_ms = 0;
  double regions_ms = 0;
  double training_ms = 0;
  // online
  double selection_ms = 0;
  double matching_ms = 0;
  double online_ms = 0;
};

/// Everything computed once per data graph and reused across queries.
struct Preprocessed {
  LabeledGraph graph;
  std::string graph_hash;
  PartitionSet partitions;
  PAG pag;
  DistanceMatrix distances;
  LabelDictionary dictionary;
  std::vector<FeatureVector> partition_features;
  std::vector<InterRegion> regions;  ///< per partition, at the configured hop budget
  std::optional<OrderEmbeddingModel> model;
  PhaseTimes offline;
  bool cache_hit = false;
};

/// Partitioning (or a cache hit), PAG distances and partition features.
inline Preprocessed preprocess(LabeledGraph g, const RunConfig &cfg) {
  cfg.validate();
  Preprocessed pre;
  pre.graph = std::move(g);
  pre.graph_hash = graph_hash(pre.graph);
  std::optional<PartitionCache> cache;
  if (!cfg.cache_dir.empty()) cache.emplace(cfg.cache_dir);

  auto t = std::chrono::steady_clock::now();
  if (cache) {
    if (auto hit = cache->load(pre.graph, pre.graph_hash, cfg.partition_size, cfg.seed)) {
      pre.partitions = std::move(hit->first);
      pre.distances = std::move(hit->second);
      pre.cache_hit = true;
    }
  }
  if (!pre.cache_hit) pre.partitions = partition_graph(pre.graph, cfg.partition_size, cfg.seed);
  pre.offline.partition_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  pre.pag = build_pag(pre.partitions);
  if (!pre.cache_hit) {
    pre.distances = pag_distances(pre.pag, cfg.threads);
    if (cache) cache->store(pre.partitions, pre.distances, pre.graph_hash, cfg.partition_size, cfg.seed);
  }
  pre.offline.distances_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  pre.dictionary = LabelDictionary::from_graph(pre.graph);
  pre.partition_features.resize(pre.partitions.size());
  parallel_for(pre.partitions.size(), cfg.threads, [&](std::size_t i) {
    pre.partition_features[i] = extract_features(pre.partitions[PartitionId(i)].local, pre.dictionary);
  });
  pre.offline.features_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  pre.regions.resize(pre.partitions.size());
  parallel_for(pre.partitions.size(), cfg.threads, [&](std::size_t i) {
    pre.regions[i] = build_inter_region(pre.partitions, pre.pag, PartitionId(i), cfg.hop_budget);
  });
  pre.offline.regions_ms = elapsed_ms(t);
  return pre;
}

/// Loads the model named in the config when that file exists, otherwise
/// trains one on pairs sampled from the partitions (and saves it when a path
/// is given). Throws ModelError when a loaded model was built for another
/// label dictionary.
inline void prepare_model(Preprocessed &pre, const RunConfig &cfg) {
  if (pre.model) return;
  auto t = std::chrono::steady_clock::now();
  if (!cfg.model_path.empty() && std::filesystem::exists(cfg.model_path)) {
    auto m = OrderEmbeddingModel::load(cfg.model_path);
    if (!(m.dictionary() == pre.dictionary))
      throw ModelError("model '" + cfg.model_path + "' has " +
                       std::to_string(m.feature_dim()) +
                       " features over a different label dictionary than this graph (" +
                       std::to_string(feature_dim(pre.dictionary)) + " features)");
    pre.model = std::move(m);
  } else {
    auto sampling = cfg.sampling;
    sampling.seed = cfg.seed;
    auto pairs = sample_training_pairs(pre.partitions, pre.partition_features, pre.dictionary,
                                       sampling);
    auto ecfg = cfg.embedding;
    ecfg.seed = cfg.seed;
    pre.model = train_order_embedding(pairs, pre.dictionary, ecfg).model;
    if (!cfg.model_path.empty()) pre.model->save(cfg.model_path);
  }
  pre.offline.training_ms = elapsed_ms(t);
}

// ---------------------------------------------------------------------------
// Reports

struct OracleSummary {
  bool available = false;
  std::string reason;  ///< why not, when unavailable
  std::size_t match_count = 0;
  SetDistance distance;
  double time_ms = 0;
};

struct RunReport {
  Mode mode = Mode::pdd;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::size_t query_vertices = 0;
  std::vector<Match> matches;
  std::vector<PartitionId> sources;  ///< partition each match was found from
  std::vector<PartitionId> visited;  ///< partitions searched, in order
  std::size_t candidates = 0;        ///< pddplus: partitions predicted to contain q
  std::size_t coverage = 0;
  double normalized_coverage = 0;    ///< coverage / (k·|V_Q|)
  SetDistance distance;
  std::optional<HopCount> h;         ///< min PAG distance between sources
  std::size_t dedup_count = 0;
  bool complete = false;
  std::vector<std::string> rungs;    ///< fallback steps that ran
  std::optional<double> nd, nt, rho;
  OracleSummary oracle;
  PhaseTimes times;
};

namespace detail {

inline nlohmann::json distance_json(const SetDistance &d) {
  if (!d) return nullptr;
  if (!d->reachable()) return "inf";
  return d->value();
}

inline nlohmann::json optional_json(const std::optional<double> &v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

/// Machine-readable report. Without timings the output depends only on the
/// inputs, config and seed.
inline nlohmann::json to_json(const RunReport &r, bool with_timings = true) {
  using nlohmann::json;
  json matches = json::array();
  for (std::size_t i = 0; i < r.matches.size(); ++i)
    matches.push_back({{"vertex_set", r.matches[i].vertex_set},
                       {"mapping", r.matches[i].mapping},
                       {"source", r.sources[i]}});
  json j{{"schema_version", kReportSchemaVersion},
         {"mode", to_string(r.mode)},
         {"k", r.k},
         {"seed", r.seed},
         {"query_vertices", r.query_vertices},
         {"matches", matches},
         {"visited_partitions", r.visited},
         {"candidate_partitions", r.candidates},
         {"coverage", r.coverage},
         {"normalized_coverage", r.normalized_coverage},
         {"distance", detail::distance_json(r.distance)},
         {"h", r.h ? detail::distance_json(*r.h) : json(nullptr)},
         {"dedup_count", r.dedup_count},
         {"status", r.complete ? "complete" : "exhausted"},
         {"fallback_rungs", r.rungs},
         {"nd", detail::optional_json(r.nd)},
         {"rho", detail::optional_json(r.rho)}};
  json oracle{{"available", r.oracle.available}};
  if (r.oracle.available) {
    oracle["match_count"] = r.oracle.match_count;
    oracle["distance"] = detail::distance_json(r.oracle.distance);
  } else {
    oracle["reason"] = r.oracle.reason;
  }
  j["oracle"] = oracle;
  if (with_timings) {
    j["nt"] = detail::optional_json(r.nt);
    j["times_ms"] = {{"partition", r.times.partition_ms},
                     {"distances", r.times.distances_ms},
                     {"features", r.times.features_ms},
                     {"regions", r.times.regions_ms},
                     {"training", r.times.training_ms},
                     {"selection", r.times.selection_ms},
                     {"matching", r.times.matching_ms},
                     {"online", r.times.online_ms}};
    if (r.oracle.available) j["oracle"]["time_ms"] = r.oracle.time_ms;
  }
  return j;
}

// ---------------------------------------------------------------------------
// Matching helpers

/// One copy per distinct vertex set, keeping the copy found in the lowest
/// partition; first-occurrence order is preserved.
inline std::vector<Match> dedup_matches(const std::vector<Match> &ms) {
  std::vector<Match> out;
  std::map<std::vector<VertexId>, std::size_t> at;
  for (const auto &m : ms) {
    auto [it, fresh] = at.try_emplace(m.vertex_set, out.size());
    if (fresh) out.push_back(m);
    else if (m.home < out[it->second].home) out[it->second] = m;
  }
  return out;
}

/// Hybrid matching on one partition: an intra-partition match if there is
/// one, otherwise a cross-partition match through its replicated vertices.
inline std::vector<Match> hybrid_match(const QueryGraph &q, const Preprocessed &pre,
                                       PartitionId p, std::uint32_t hop_budget,
                                       std::size_t limit = 1) {
  auto intra = intra_search(q, pre.partitions[p], limit);
  if (!intra.matches.empty()) return intra.matches;
  if (p < pre.regions.size() && pre.regions[p].hops == hop_budget)
    return enumerate_inter(q, pre.partitions, pre.regions[p], limit);
  return enumerate_inter(q, pre.partitions, pre.pag, p, hop_budget, limit);
}

namespace detail {

/// Accumulates distinct matches with the partition each came from.
struct Collector {
  std::size_t k;
  std::vector<Match> matches;
  std::vector<PartitionId> sources;
  std::set<std::vector<VertexId>> seen;
  std::vector<PartitionId> visited;
  std::vector<char> tried;
  std::size_t duplicates = 0;

  Collector(std::size_t k, std::size_t partitions) : k(k), tried(partitions, 0) {}

  bool full() const { return matches.size() >= k; }

  void visit(PartitionId p) {
    if (!tried[p]) tried[p] = 1, visited.push_back(p);
  }

  void add(PartitionId source, const std::vector<Match> &found) {
    for (const auto &m : found) {
      if (full()) return;
      if (!seen.insert(m.vertex_set).second) {
        ++duplicates;
        continue;
      }
      matches.push_back(m);
      sources.push_back(source);
    }
  }
};

/// Matches a batch of partitions in parallel and merges in batch order.
inline void match_batch(const QueryGraph &q, const Preprocessed &pre, const RunConfig &cfg,
                        const std::vector<PartitionId> &batch, Collector &c) {
  std::vector<std::vector<Match>> found(batch.size());
  parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
    found[i] = hybrid_match(q, pre, batch[i], cfg.hop_budget);
  });
  for (std::size_t i = 0; i < batch.size(); ++i) {
    c.visit(batch[i]);
    c.add(batch[i], found[i]);
  }
}

/// Product of refined intra candidate-set sizes per partition; 0 when the
/// filter rules the partition out.
inline std::vector<double> candidate_products(const QueryGraph &q, const Preprocessed &pre,
                                              std::size_t threads) {
  std::vector<double> out(pre.partitions.size(), 0.0);
  parallel_for(out.size(), threads, [&](std::size_t i) {
    const auto &p = pre.partitions[PartitionId(i)];
    auto cs = filter_candidates(q, p.local);
    if (!cs.any_empty() && try_refine_semiperfect(q, cs, p.local)) out[i] = cs.size_product();
  });
  return out;
}

/// Backtracking fill: while fewer than k matches, pick the next k − |M|
/// untried partitions one by one, each farthest (max-min PAG distance) from
/// the partitions already holding matches and those picked before it in the
/// batch; ties prefer partitions whose candidate filter passed, then smaller
/// candidate products, then lower ids. Stops when every partition was tried.
inline void dispersion_fill(const QueryGraph &q, const Preprocessed &pre, const RunConfig &cfg,
                            Collector &c) {
  if (c.full()) return;
  const auto P = pre.partitions.size();
  std::optional<std::vector<double>> products;
  while (!c.full()) {
    std::vector<PartitionId> anchor(c.sources.begin(), c.sources.end());
    std::sort(anchor.begin(), anchor.end());
    anchor.erase(std::unique(anchor.begin(), anchor.end()), anchor.end());
    std::vector<HopCount> to_set(P, HopCount::unreachable());
    for (auto a : anchor)
      for (PartitionId p = 0; p < P; ++p) to_set[p] = std::min(to_set[p], pre.distances.at(a, p));
    if (!products) products = candidate_products(q, pre, cfg.threads);
    auto promise_less = [&](PartitionId a, PartitionId b) {
      // true when a is more promising than b
      const bool pa = (*products)[a] > 0, pb = (*products)[b] > 0;
      if (pa != pb) return pa;
      if ((*products)[a] != (*products)[b]) return (*products)[a] < (*products)[b];
      return a < b;
    };
    std::vector<char> picked(P, 0);
    std::vector<PartitionId> batch;
    const auto want = c.k - c.matches.size();
    while (batch.size() < want) {
      std::optional<PartitionId> best;
      for (PartitionId p = 0; p < P; ++p) {
        if (c.tried[p] || picked[p]) continue;
        if (!best || to_set[p] > to_set[*best] ||
            (to_set[p] == to_set[*best] && promise_less(p, *best)))
          best = p;
      }
      if (!best) break;
      picked[*best] = 1;
      batch.push_back(*best);
      for (PartitionId p = 0; p < P; ++p)
        to_set[p] = std::min(to_set[p], pre.distances.at(*best, p));
    }
    if (batch.empty()) return;
    match_batch(q, pre, cfg, batch, c);
  }
}

/// Last resort: collect up to k distinct matches per partition (intra, then
/// cross-partition with hop budgets escalating to the PAG diameter) and add
/// them greedily, each time taking the candidate farthest from the matches
/// already held. With the diameter budget every match of q is reachable, so
/// this returns k matches whenever the graph has them.
inline void exhaust(const QueryGraph &q, const Preprocessed &pre, const RunConfig &cfg,
                    Collector &c) {
  if (c.full()) return;
  const auto P = pre.partitions.size();
  const auto diameter = std::max<std::uint32_t>(1, pre.distances.diameter());
  std::vector<std::vector<Match>> intra(P);
  parallel_for(P, cfg.threads, [&](std::size_t i) {
    intra[i] = intra_search(q, pre.partitions[PartitionId(i)], c.k).matches;
  });

  std::vector<Match> pool;
  std::vector<PartitionId> pool_source;
  std::set<std::vector<VertexId>> pooled;
  auto offer = [&](PartitionId p, const std::vector<Match> &ms) {
    for (const auto &m : ms)
      if (!c.seen.count(m.vertex_set) && pooled.insert(m.vertex_set).second) {
        pool.push_back(m);
        pool_source.push_back(p);
      }
  };
  for (PartitionId p = 0; p < P; ++p) offer(p, intra[p]);

  std::uint32_t hops = std::min(diameter, cfg.hop_budget + 1);
  while (c.matches.size() + pool.size() < c.k && q.edge_count() > 0) {
    std::vector<std::vector<Match>> inter(P);
    parallel_for(P, cfg.threads, [&](std::size_t i) {
      inter[i] = enumerate_inter(q, pre.partitions, pre.pag, PartitionId(i), hops, c.k);
    });
    for (PartitionId p = 0; p < P; ++p) offer(p, inter[p]);
    if (hops >= diameter) break;
    hops = std::min(diameter, hops * 2);
  }
  for (PartitionId p = 0; p < P; ++p) c.visit(p);

  // Greedy max-min additions.
  std::vector<HopCount> to_held(pool.size(), HopCount::unreachable());
  auto absorb = [&](const Match &m) {
    auto dist = multi_source_bfs(pre.graph, m.vertex_set);
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (auto v : pool[i].vertex_set) to_held[i] = std::min(to_held[i], dist[v]);
  };
  for (const auto &m : c.matches) absorb(m);
  std::vector<char> used(pool.size(), 0);
  while (!c.full()) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (!used[i] && (!best || to_held[i] > to_held[*best])) best = i;
    if (!best) break;
    used[*best] = 1;
    c.add(pool_source[*best], {pool[*best]});
    absorb(pool[*best]);
  }
}

inline void finish_report(RunReport &r, const Preprocessed &pre, const QueryGraph &q,
                          const RunConfig &cfg, Collector &c) {
  r.mode = cfg.mode;
  r.k = cfg.k;
  r.seed = cfg.seed;
  r.query_vertices = q.vertex_count();
  r.matches = std::move(c.matches);
  r.sources = std::move(c.sources);
  r.visited = std::move(c.visited);
  r.dedup_count = c.duplicates;
  r.complete = r.matches.size() >= cfg.k;
  r.coverage = coverage(r.matches);
  r.normalized_coverage = double(r.coverage) / double(cfg.k * q.vertex_count());
  r.distance = distance_diversity(pre.graph, r.matches);
  r.h.reset();
  for (std::size_t i = 0; i < r.sources.size(); ++i)
    for (std::size_t j = i + 1; j < r.sources.size(); ++j) {
      auto d = pre.distances.at(r.sources[i], r.sources[j]);
      if (!r.h || d < *r.h) r.h = d;
    }
  r.times.partition_ms = pre.offline.partition_ms;
  r.times.distances_ms = pre.offline.distances_ms;
  r.times.features_ms = pre.offline.features_ms;
  r.times.training_ms = pre.offline.training_ms;
}

}  // namespace detail

/// Partition-based search: k dispersed partitions, one hybrid match each,
/// then dispersion-ordered backtracking and, if still short, exhaustive
/// collection.
inline RunReport run_pdd(const Preprocessed &pre, const QueryGraph &q, RunConfig cfg) {
  cfg.mode = Mode::pdd;
  cfg.validate();
  RunReport r;
  const auto start = std::chrono::steady_clock::now();
  detail::Collector c(cfg.k, pre.partitions.size());

  auto t = std::chrono::steady_clock::now();
  const auto first = greedy_dispersion_select(
      pre.distances, std::min(cfg.k, pre.partitions.size()), cfg.seed);
  r.times.selection_ms = elapsed_ms(t);

  t = std::chrono::steady_clock::now();
  detail::match_batch(q, pre, cfg, first, c);
  if (!c.full()) {
    r.rungs.push_back("backtrack");
    detail::dispersion_fill(q, pre, cfg, c);
  }
  if (!c.full()) {
    r.rungs.push_back("exhaustive");
    detail::exhaust(q, pre, cfg, c);
  }
  r.times.matching_ms = elapsed_ms(t);
  r.times.online_ms = elapsed_ms(start);
  detail::finish_report(r, pre, q, cfg, c);
  return r;
}

/// Embedding-filtered search: partitions predicted to contain q form the
/// distance graph, the densest-style selection picks pairwise non-adjacent
/// partitions and matches them. Fallbacks when short of k: (1) admit
/// predicted-negative partitions in order of slack and rerun the selection,
/// (2) dispersion-ordered backtracking over all partitions, (3) exhaustive
/// collection with escalating hop budgets.
inline RunReport run_pddplus(const Preprocessed &pre, const QueryGraph &q, RunConfig cfg) {
  cfg.mode = Mode::pddplus;
  cfg.validate();
  if (!pre.model) throw ModelError("pddplus needs a trained model");
  const auto &model = *pre.model;
  model.check_dim(feature_dim(pre.dictionary));
  if (!(model.dictionary() == pre.dictionary))
    throw ModelError("model label dictionary differs from the data graph's");

  RunReport r;
  const auto start = std::chrono::steady_clock::now();
  const auto P = pre.partitions.size();

  auto t = std::chrono::steady_clock::now();
  const auto qf = extract_features(q, pre.dictionary);
  std::vector<double> slack(P);
  parallel_for(P, cfg.threads, [&](std::size_t i) {
    slack[i] = model.slack(qf, pre.partition_features[i]);
  });
  std::vector<PartitionId> positive, negative;
  for (PartitionId p = 0; p < P; ++p) (slack[p] + cfg.tolerance >= 0 ? positive : negative).push_back(p);
  std::stable_sort(negative.begin(), negative.end(),
                   [&](auto a, auto b) { return slack[a] > slack[b]; });
  r.candidates = positive.size();
  r.times.selection_ms += elapsed_ms(t);

  // Matcher results are cached so reruns over larger candidate sets only
  // match new partitions. Each slot is written by one task.
  std::vector<std::optional<std::vector<Match>>> cache(P);
  auto matcher = [&](PartitionId p) {
    if (!cache[p]) cache[p] = hybrid_match(q, pre, p, cfg.hop_budget);
    return *cache[p];
  };

  // Partitions a selection consumed. Parallel batches may match a few more
  // than that; those stay out of the report so it does not depend on threads.
  std::vector<char> tried(P, 0);
  auto select = [&](const std::vector<PartitionId> &cands) {
    auto ts = std::chrono::steady_clock::now();
    auto pdg = build_pdg(cands, pre.distances);
    r.times.selection_ms += elapsed_ms(ts);
    if (pdg.empty()) return DekpsResult{};
    auto d = dekps_select(pdg, cfg.k, matcher, cfg.threads, cfg.dekps_pick);
    for (auto p : d.selected) tried[p] = 1;
    return d;
  };

  t = std::chrono::steady_clock::now();
  auto best = select(positive);
  auto distinct = [](const DekpsResult &d) { return dedup_matches(d.matches).size(); };

  // Extension grows an existing candidate set; with no positive partition at
  // all the filter gave no signal and dispersion takes over directly.
  std::vector<PartitionId> cands = positive;
  if (distinct(best) < cfg.k && !positive.empty() && !negative.empty()) {
    r.rungs.push_back("extend_candidates");
    for (std::size_t at = 0; at < negative.size() && distinct(best) < cfg.k;) {
      const auto end = std::min(negative.size(), at + cfg.k);
      cands.insert(cands.end(), negative.begin() + long(at), negative.begin() + long(end));
      at = end;
      auto next = select(cands);
      if (distinct(next) > distinct(best)) best = std::move(next);
    }
  }

  detail::Collector c(cfg.k, P);
  for (auto p : best.selected) {
    c.visit(p);
    c.add(p, *cache[p]);
  }
  // Partitions matched in earlier, discarded selections count as tried.
  for (PartitionId p = 0; p < P; ++p)
    if (tried[p] && cache[p]->empty()) c.visit(p);

  if (!c.full()) {
    r.rungs.push_back("dispersion");
    detail::dispersion_fill(q, pre, cfg, c);
  }
  if (!c.full()) {
    r.rungs.push_back("escalate_hops");
    detail::exhaust(q, pre, cfg, c);
  }
  r.times.matching_ms = elapsed_ms(t);
  r.times.online_ms = elapsed_ms(start);
  detail::finish_report(r, pre, q, cfg, c);
  return r;
}

/// Brute force: every match by the oracle, then exact max-min selection.
/// Throws CapExceeded or BudgetExceeded when the instance is too large.
inline RunReport run_oracle(const LabeledGraph &g, const QueryGraph &q, RunConfig cfg) {
  cfg.mode = Mode::oracle;
  cfg.validate();
  RunReport r;
  const auto start = std::chrono::steady_clock::now();
  auto all = oracle_enumerate(g, q, cfg.oracle_limits);
  auto t = std::chrono::steady_clock::now();
  r.times.matching_ms = elapsed_ms(start);
  std::vector<Match> chosen;
  if (all.size() <= cfg.k) {
    chosen = all;
    std::sort(chosen.begin(), chosen.end(),
              [](const Match &a, const Match &b) { return a.vertex_set < b.vertex_set; });
  } else {
    chosen = oracle_select_topk(g, all, cfg.k, SelectMode::exact, cfg.exact_budget).result.matches;
  }
  r.times.selection_ms = elapsed_ms(t);
  r.times.online_ms = elapsed_ms(start);

  r.mode = Mode::oracle;
  r.k = cfg.k;
  r.seed = cfg.seed;
  r.query_vertices = q.vertex_count();
  r.matches = std::move(chosen);
  r.sources.assign(r.matches.size(), kCrossPartition);
  r.complete = r.matches.size() >= cfg.k;
  r.coverage = coverage(r.matches);
  r.normalized_coverage = double(r.coverage) / double(cfg.k * q.vertex_count());
  r.distance = distance_diversity(g, r.matches);
  r.oracle.available = true;
  r.oracle.match_count = all.size();
  r.oracle.distance = r.distance;
  r.oracle.time_ms = r.times.online_ms;
  r.nd = 1.0;
  r.rho = 1.0;
  r.nt = 1.0;
  return r;
}

/// log10 of a time in milliseconds, floored at 1 ms.
inline double log_ms(double ms) { return std::log10(std::max(1.0, ms)); }

/// Fills the oracle-relative columns of `r` from an oracle run: ND = ρ =
/// F_dis / F_dis of the exact optimum, NT = log10(time) / log10(oracle
/// time). NT is left unavailable when the oracle time is at the 1 ms floor.
inline void attach_oracle(RunReport &r, const RunReport &oracle) {
  r.oracle.available = true;
  r.oracle.reason.clear();
  r.oracle.match_count = oracle.oracle.match_count;
  r.oracle.distance = oracle.distance;
  r.oracle.time_ms = oracle.times.online_ms;
  r.nd = approximation_ratio(r.distance, oracle.distance);
  r.rho = r.nd;
  const double denom = log_ms(oracle.times.online_ms);
  if (denom > 0) r.nt = log_ms(r.times.online_ms) / denom;
  else r.nt.reset();
}

inline void mark_oracle_unavailable(RunReport &r, std::string reason) {
  r.oracle = OracleSummary{};
  r.oracle.reason = std::move(reason);
  r.nd.reset();
  r.nt.reset();
  r.rho.reset();
}

/// Runs the configured mode end to end.
inline RunReport run(Preprocessed &pre, const QueryGraph &q, const RunConfig &cfg) {
  switch (cfg.mode) {
    case Mode::pdd: return run_pdd(pre, q, cfg);
    case Mode::pddplus:
      prepare_model(pre, cfg);
      return run_pddplus(pre, q, cfg);
    case Mode::oracle: return run_oracle(pre.graph, q, cfg);
  }
  throw ConfigError("unknown mode");
}

/// Convenience entry points that preprocess first.
inline RunReport run_pdd(const LabeledGraph &g, const QueryGraph &q, const RunConfig &cfg) {
  return run_pdd(preprocess(g, cfg), q, cfg);
}

inline RunReport run_pddplus(const LabeledGraph &g, const QueryGraph &q, const RunConfig &cfg) {
  auto pre = preprocess(g, cfg);
  prepare_model(pre, cfg);
  return run_pddplus(pre, q, cfg);
}

}  // namespace divmatch
