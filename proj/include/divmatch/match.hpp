//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "divmatch/graph.hpp"
#include "divmatch/partition.hpp"

namespace divmatch {

using QueryVertex = VertexId;

inline constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();

/// An injective, label- and edge-preserving mapping of the query into the
/// data graph. Two matches are the same result when their vertex sets agree.
struct Match {
  std::vector<VertexId> mapping;
  std::vector<VertexId> vertex_set;
  PartitionId home = kCrossPartition;

  static Match from_mapping(std::vector<VertexId> mapping, PartitionId home) {
    Match m;
    m.vertex_set = mapping;
    std::sort(m.vertex_set.begin(), m.vertex_set.end());
    m.mapping = std::move(mapping);
    m.home = home;
    return m;
  }

  bool cross_partition() const { return home == kCrossPartition; }
  bool operator==(const Match &) const = default;
};

/// Some query vertex has no admissible data vertex.
class EmptyCandidate : public std::runtime_error {
 public:
  explicit EmptyCandidate(QueryVertex u)
      : std::runtime_error("no candidate for query vertex " + std::to_string(u)),
        vertex(u) {}
  QueryVertex vertex;
};

/// Sorted candidate lists per query vertex, in the host graph's id space.
struct CandidateSets {
  std::vector<std::vector<VertexId>> sets;

  std::size_t size() const { return sets.size(); }
  const std::vector<VertexId> &operator[](QueryVertex u) const { return sets.at(u); }
  bool any_empty() const {
    return std::any_of(sets.begin(), sets.end(), [](auto &s) { return s.empty(); });
  }
  /// Product of set sizes, a rough proxy for the search space.
  double size_product() const {
    double p = 1.0;
    for (const auto &s : sets) p *= double(s.size());
    return p;
  }
  bool operator==(const CandidateSets &) const = default;
};

struct MatchOrder {
  std::vector<QueryVertex> order;
  bool connected = true;
};

/// State kept for a cross-partition match: where the search started, which
/// replicated vertices of that partition the match binds, and the query
/// vertices mapped beyond it.
struct BoundaryContext {
  PartitionId origin = 0;
  std::vector<VertexId> bound_replicas;
  std::vector<std::pair<QueryVertex, VertexId>> frontier;
};

namespace detail {

/// Neighbor label multiset of a query vertex as sorted (label, count).
inline std::vector<std::pair<Label, std::uint32_t>> neighbor_label_counts(
    const LabeledGraph &g, VertexId v) {
  std::vector<Label> ls;
  for (auto w : g.neighbors(v)) ls.push_back(g.label(w));
  std::sort(ls.begin(), ls.end());
  std::vector<std::pair<Label, std::uint32_t>> out;
  for (auto l : ls) {
    if (out.empty() || out.back().first != l)
      out.push_back({l, 1});
    else
      ++out.back().second;
  }
  return out;
}

/// Kuhn's augmenting-path bipartite matching; left side must be saturated.
class Bipartite {
 public:
  Bipartite() = default;
  Bipartite(std::size_t left, std::size_t right)
      : adj_(left), match_right_(right, kFree), seen_(right, 0) {}

  /// Empties the graph for reuse without giving back memory.
  void reset(std::size_t left, std::size_t right) {
    if (adj_.size() < left) adj_.resize(left);
    adj_.resize(left);
    for (auto &a : adj_) a.clear();
    match_right_.assign(right, kFree);
    seen_.assign(right, 0);
    epoch_ = 0;
  }

  void add(std::size_t l, std::size_t r) { adj_[l].push_back(r); }

  bool saturates_left() {
    for (std::size_t l = 0; l < adj_.size(); ++l) {
      ++epoch_;
      if (!augment(l)) return false;
    }
    return true;
  }

 private:
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

  bool augment(std::size_t l) {
    for (auto r : adj_[l]) {
      if (seen_[r] == epoch_) continue;
      seen_[r] = epoch_;
      if (match_right_[r] == kFree || augment(match_right_[r])) {
        match_right_[r] = l;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> match_right_;
  std::vector<std::uint32_t> seen_;
  std::uint32_t epoch_ = 0;
};

inline std::vector<std::vector<char>> membership(const CandidateSets &cs,
                                                 std::size_t host_size) {
  std::vector<std::vector<char>> in(cs.size(), std::vector<char>(host_size, 0));
  for (std::size_t u = 0; u < cs.size(); ++u)
    for (auto v : cs.sets[u]) in[u][v] = 1;
  return in;
}

}  // namespace detail

/// Label, degree and neighbor-label-multiset filtering against `host`. Sets
/// may come back empty.
/// A nonempty `keep` mask restricts the sets to host vertices marked in it.
inline CandidateSets filter_candidates(const LabeledGraph &q, const LabeledGraph &host,
                                       std::span<const char> keep = {}) {
  CandidateSets cs;
  cs.sets.resize(q.vertex_count());
  std::vector<std::uint32_t> count(std::max(host.label_bound(), q.label_bound()), 0);
  for (QueryVertex u = 0; u < q.vertex_count(); ++u) {
    const auto need = detail::neighbor_label_counts(q, u);
    const auto lu = q.label(u);
    const auto du = q.degree(u);
    for (VertexId c = 0; c < host.vertex_count(); ++c) {
      if (!keep.empty() && !keep[c]) continue;
      if (host.label(c) != lu || host.degree(c) < du) continue;
      for (auto w : host.neighbors(c)) ++count[host.label(w)];
      bool ok = std::all_of(need.begin(), need.end(),
                            [&](auto &lc) { return count[lc.first] >= lc.second; });
      for (auto w : host.neighbors(c)) count[host.label(w)] = 0;
      if (ok) cs.sets[u].push_back(c);
    }
  }
  return cs;
}

/// As filter_candidates, but an empty set raises EmptyCandidate.
inline CandidateSets build_candidates(const LabeledGraph &q, const LabeledGraph &host) {
  auto cs = filter_candidates(q, host);
  for (QueryVertex u = 0; u < cs.size(); ++u)
    if (cs.sets[u].empty()) throw EmptyCandidate(u);
  return cs;
}

inline CandidateSets build_candidates(const QueryGraph &q, const Partition &p) {
  return build_candidates(q, p.local);
}

/// Drops candidate c of u when the neighbors of u cannot be matched
/// injectively onto neighbors of c that are candidates for them. Repeats to a
/// fixed point. Returns false (leaving some set empty) instead of throwing.
inline bool try_refine_semiperfect(const LabeledGraph &q, CandidateSets &cs,
                                   const LabeledGraph &host) {
  auto in = detail::membership(cs, host.vertex_count());
  detail::Bipartite b;
  bool changed = true;
  while (changed) {
    changed = false;
    for (QueryVertex u = 0; u < q.vertex_count(); ++u) {
      auto qn = q.neighbors(u);
      if (qn.empty()) continue;
      auto &set = cs.sets[u];
      std::vector<VertexId> kept;
      kept.reserve(set.size());
      for (auto c : set) {
        auto dn = host.neighbors(c);
        b.reset(qn.size(), dn.size());
        for (std::size_t i = 0; i < qn.size(); ++i)
          for (std::size_t j = 0; j < dn.size(); ++j)
            if (in[qn[i]][dn[j]]) b.add(i, j);
        if (b.saturates_left())
          kept.push_back(c);
        else
          in[u][c] = 0;
      }
      if (kept.size() != set.size()) {
        changed = true;
        set.swap(kept);
        if (set.empty()) return false;
      }
    }
  }
  return true;
}

inline CandidateSets refine_semiperfect(const LabeledGraph &q, CandidateSets cs,
                                        const LabeledGraph &host) {
  if (!try_refine_semiperfect(q, cs, host)) {
    for (QueryVertex u = 0; u < cs.size(); ++u)
      if (cs.sets[u].empty()) throw EmptyCandidate(u);
  }
  return cs;
}

inline CandidateSets refine_semiperfect(const QueryGraph &q, CandidateSets cs,
                                        const Partition &p) {
  return refine_semiperfect(q, std::move(cs), p.local);
}

/// Connected matching order. The first vertex minimizes |C(u)|/deg(u); each
/// following vertex is the one adjacent to the prefix with the smallest
/// estimate |C(u)| · Π 1/deg(w) over its already ordered neighbors w.
inline MatchOrder plan_order(const LabeledGraph &q, const CandidateSets &cs) {
  const auto n = q.vertex_count();
  MatchOrder mo;
  if (n == 0) return mo;
  std::vector<char> placed(n, 0);
  auto pick_start = [&] {
    QueryVertex best = n;
    double best_score = 0;
    for (QueryVertex u = 0; u < n; ++u) {
      if (placed[u]) continue;
      double score = double(cs[u].size()) / double(std::max<std::uint32_t>(1, q.degree(u)));
      if (best == n || score < best_score) best = u, best_score = score;
    }
    return best;
  };
  mo.order.push_back(pick_start());
  placed[mo.order[0]] = 1;
  while (mo.order.size() < n) {
    QueryVertex best = static_cast<QueryVertex>(n);
    double best_est = 0;
    for (QueryVertex u = 0; u < n; ++u) {
      if (placed[u]) continue;
      double est = double(cs[u].size());
      bool frontier = false;
      for (auto w : q.neighbors(u))
        if (placed[w]) {
          frontier = true;
          est /= double(q.degree(w));
        }
      if (frontier && (best == n || est < best_est)) best = u, best_est = est;
    }
    if (best == n) {
      mo.connected = false;
      best = pick_start();
    }
    mo.order.push_back(best);
    placed[best] = 1;
  }
  return mo;
}

/// Backtracking enumeration of embeddings of q in host following `order`.
/// Extensions are the ordered intersection of the candidate list with the
/// adjacency lists of already mapped neighbors. visit(mapping) receives
/// host-local ids indexed by query vertex and returns false to stop.
template <typename Visit>
void for_each_embedding(const LabeledGraph &q, const LabeledGraph &host,
                        const MatchOrder &order, const CandidateSets &cs,
                        Visit &&visit) {
  const auto n = q.vertex_count();
  if (n == 0 || cs.any_empty()) return;
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order.order[i]] = i;
  std::vector<std::vector<QueryVertex>> backward(n);
  for (std::size_t i = 0; i < n; ++i)
    for (auto w : q.neighbors(order.order[i]))
      if (position[w] < i) backward[i].push_back(w);

  std::vector<VertexId> mapping(n);
  std::vector<char> used(host.vertex_count(), 0);
  std::vector<std::vector<VertexId>> extension(n), scratch(n);
  bool stop = false;

  std::function<void(std::size_t)> extend = [&](std::size_t depth) {
    const auto u = order.order[depth];
    auto &ext = extension[depth];
    if (backward[depth].empty()) {
      ext = cs[u];
    } else {
      ext.clear();
      auto first = host.neighbors(mapping[backward[depth][0]]);
      std::set_intersection(first.begin(), first.end(), cs[u].begin(), cs[u].end(),
                            std::back_inserter(ext));
      for (std::size_t b = 1; b < backward[depth].size() && !ext.empty(); ++b) {
        auto nb = host.neighbors(mapping[backward[depth][b]]);
        scratch[depth].clear();
        std::set_intersection(ext.begin(), ext.end(), nb.begin(), nb.end(),
                              std::back_inserter(scratch[depth]));
        ext.swap(scratch[depth]);
      }
    }
    for (auto v : ext) {
      if (used[v]) continue;
      mapping[u] = v;
      if (depth + 1 == n) {
        if (!visit(std::span<const VertexId>(mapping))) {
          stop = true;
          return;
        }
      } else {
        used[v] = 1;
        extend(depth + 1);
        used[v] = 0;
      }
      if (stop) return;
    }
  };
  extend(0);
}

/// Up to `limit` embeddings of q fully inside partition p, in deterministic
/// order. Automorphic mappings are all reported.
inline std::vector<Match> enumerate_intra(const QueryGraph &q, const Partition &p,
                                          const MatchOrder &order,
                                          const CandidateSets &cs,
                                          std::size_t limit = kUnlimited) {
  std::vector<Match> out;
  if (limit == 0) return out;
  for_each_embedding(q, p.local, order, cs, [&](std::span<const VertexId> local) {
    std::vector<VertexId> global(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) global[i] = p.to_global(local[i]);
    out.push_back(Match::from_mapping(std::move(global), p.id));
    return out.size() < limit;
  });
  return out;
}

/// Result of the full intra pipeline on one partition.
struct IntraResult {
  std::vector<Match> matches;
  double candidate_product = 0.0;  ///< 0 when filtering ruled the partition out
};

/// Filter, refine, order and enumerate inside p. With `distinct_sets` the
/// limit counts distinct vertex sets and automorphic duplicates are skipped.
inline IntraResult intra_search(const QueryGraph &q, const Partition &p,
                                std::size_t limit, bool distinct_sets = true) {
  IntraResult r;
  if (limit == 0) return r;
  auto cs = filter_candidates(q, p.local);
  if (cs.any_empty() || !try_refine_semiperfect(q, cs, p.local)) return r;
  r.candidate_product = cs.size_product();
  auto order = plan_order(q, cs);
  std::set<std::vector<VertexId>> seen;
  for_each_embedding(q, p.local, order, cs, [&](std::span<const VertexId> local) {
    std::vector<VertexId> global(local.size());
    for (std::size_t i = 0; i < local.size(); ++i) global[i] = p.to_global(local[i]);
    auto m = Match::from_mapping(std::move(global), p.id);
    if (distinct_sets && !seen.insert(m.vertex_set).second) return true;
    r.matches.push_back(std::move(m));
    return r.matches.size() < limit;
  });
  return r;
}

/// Partitions within `hops` of `start` in the PAG, ascending.
inline std::vector<PartitionId> pag_ball(const PAG &pag, PartitionId start,
                                         std::uint32_t hops) {
  std::vector<PartitionId> out;
  auto dist = bfs_distances(pag.graph(), start);
  for (PartitionId p = 0; p < dist.size(); ++p)
    if (dist[p].reachable() && dist[p].value() <= hops) out.push_back(p);
  return out;
}

/// The part of a cross-partition search that does not depend on the query:
/// the union of the partitions within `hops` PAG hops of `origin` as one
/// graph on local ids, the origin's replicated vertices in those ids, and
/// every vertex's hop distance to the nearest of them.
struct InterRegion {
  PartitionId origin = 0;
  std::uint32_t hops = 0;
  LabeledGraph host;
  std::vector<VertexId> to_global;
  std::vector<VertexId> seeds;
  std::vector<HopCount> seed_distance;
};

inline InterRegion build_inter_region(const PartitionSet &ps, const PAG &pag, PartitionId start,
                                      std::uint32_t hops) {
  InterRegion r;
  r.origin = start;
  r.hops = hops;
  const auto &origin = ps[start];
  auto region = pag_ball(pag, start, hops);
  std::vector<Edge> global_edges;
  for (auto pid : region) {
    const auto &p = ps[pid];
    r.to_global.insert(r.to_global.end(), p.vertices.begin(), p.vertices.end());
    global_edges.insert(global_edges.end(), p.edges.begin(), p.edges.end());
  }
  auto &to_global = r.to_global;
  std::sort(to_global.begin(), to_global.end());
  to_global.erase(std::unique(to_global.begin(), to_global.end()), to_global.end());
  auto local_of = [&](VertexId g) {
    return static_cast<VertexId>(
        std::lower_bound(to_global.begin(), to_global.end(), g) - to_global.begin());
  };
  std::vector<Label> labels(to_global.size());
  std::vector<Edge> edges;
  edges.reserve(global_edges.size());
  for (auto &e : global_edges) edges.push_back({local_of(e.u), local_of(e.v)});
  // Labels come from any partition holding the vertex.
  for (auto pid : region) {
    const auto &p = ps[pid];
    for (VertexId i = 0; i < p.vertices.size(); ++i)
      labels[local_of(p.vertices[i])] = p.local.label(i);
  }
  r.host = LabeledGraph(std::move(labels), edges);
  for (auto v : origin.replicated) r.seeds.push_back(local_of(v));
  std::sort(r.seeds.begin(), r.seeds.end());
  if (!r.seeds.empty()) r.seed_distance = multi_source_bfs(r.host, r.seeds);
  return r;
}

/// Cross-partition matches on a prepared region; see the overload below.
inline std::vector<Match> enumerate_inter(const QueryGraph &q, const PartitionSet &ps,
                                          const InterRegion &region,
                                          std::size_t limit = kUnlimited,
                                          std::vector<BoundaryContext> *contexts = nullptr) {
  std::vector<Match> out;
  if (region.hops == 0 || limit == 0 || q.edge_count() == 0 || region.seeds.empty()) return out;
  const auto start = region.origin;
  const auto &origin = ps[start];
  const auto &host = region.host;
  const auto &to_global = region.to_global;
  const auto &seeds = region.seeds;

  // A match through a seed lies within |V_Q| − 1 hops of it.
  std::vector<char> near_seeds(host.vertex_count(), 0);
  for (VertexId v = 0; v < host.vertex_count(); ++v)
    near_seeds[v] = region.seed_distance[v].reachable() &&
                    region.seed_distance[v].value() < q.vertex_count();
  auto cs = filter_candidates(q, host, near_seeds);
  if (cs.any_empty() || !try_refine_semiperfect(q, cs, host)) return out;

  const auto n = q.vertex_count();
  std::vector<QueryVertex> roots(n);
  std::iota(roots.begin(), roots.end(), 0);
  std::stable_sort(roots.begin(), roots.end(),
                   [&](auto a, auto b) { return cs[a].size() < cs[b].size(); });

  std::set<std::vector<VertexId>> seen;
  std::vector<std::vector<char>> allowed(n, std::vector<char>(host.vertex_count(), 0));
  std::vector<std::pair<QueryVertex, VertexId>> touched;  // entries of `allowed` set to 1
  std::vector<std::uint32_t> near(host.vertex_count(), 0);
  std::uint32_t near_stamp = 0;
  std::vector<char> used(host.vertex_count(), 0);

  for (auto root : roots) {
    // BFS tree of the query.
    std::vector<QueryVertex> tree_order{root};
    std::vector<QueryVertex> parent(n, root);
    std::vector<char> reached(n, 0);
    reached[root] = 1;
    for (std::size_t i = 0; i < tree_order.size(); ++i)
      for (auto w : q.neighbors(tree_order[i]))
        if (!reached[w]) {
          reached[w] = 1;
          parent[w] = tree_order[i];
          tree_order.push_back(w);
        }

    std::vector<std::vector<VertexId>> filtered(n);
    std::set_intersection(cs[root].begin(), cs[root].end(), seeds.begin(), seeds.end(),
                          std::back_inserter(filtered[root]));
    if (filtered[root].empty()) continue;

    // Top-down.
    for (auto [u, v] : touched) allowed[u][v] = 0;
    touched.clear();
    for (auto v : filtered[root]) allowed[root][v] = 1, touched.push_back({root, v});
    bool dead = false;
    for (std::size_t i = 1; i < n && !dead; ++i) {
      auto u = tree_order[i];
      ++near_stamp;
      for (auto pv : filtered[parent[u]])
        for (auto w : host.neighbors(pv)) near[w] = near_stamp;
      for (auto c : cs[u])
        if (near[c] == near_stamp) {
          filtered[u].push_back(c);
          allowed[u][c] = 1;
          touched.push_back({u, c});
        }
      dead = filtered[u].empty();
    }
    if (dead) continue;
    // Bottom-up.
    for (std::size_t i = n; i-- > 1 && !dead;) {
      auto u = tree_order[i];
      auto p = parent[u];
      std::vector<VertexId> keep;
      for (auto pv : filtered[p]) {
        auto nb = host.neighbors(pv);
        if (std::any_of(nb.begin(), nb.end(), [&](auto w) { return allowed[u][w] != 0; }))
          keep.push_back(pv);
        else
          allowed[p][pv] = 0;
      }
      filtered[p].swap(keep);
      dead = filtered[p].empty();
    }
    if (dead) continue;

    std::vector<std::vector<QueryVertex>> back_edges(n);
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < n; ++i) position[tree_order[i]] = i;
    for (std::size_t i = 1; i < n; ++i)
      for (auto w : q.neighbors(tree_order[i]))
        if (position[w] < i && w != parent[tree_order[i]])
          back_edges[i].push_back(w);

    std::vector<VertexId> mapping(n);
    bool stop = false;
    auto emit = [&] {
      std::vector<VertexId> global(n);
      for (std::size_t i = 0; i < n; ++i) global[i] = to_global[mapping[i]];
      PartitionId owner = kCrossPartition;
      bool spans = false;
      for (VertexId a = 0; a < n && !spans; ++a)
        for (auto b : q.neighbors(a)) {
          if (a > b) continue;
          auto o = ps.edge_owner(global[a], global[b]);
          if (owner == kCrossPartition) owner = o;
          else if (o != owner) spans = true;
        }
      if (!spans) return;
      auto m = Match::from_mapping(std::move(global), kCrossPartition);
      if (!seen.insert(m.vertex_set).second) return;
      if (contexts) {
        BoundaryContext ctx;
        ctx.origin = start;
        for (QueryVertex u = 0; u < n; ++u) {
          auto v = m.mapping[u];
          if (origin.is_replicated(v)) ctx.bound_replicas.push_back(v);
          if (!origin.contains(v)) ctx.frontier.push_back({u, v});
        }
        std::sort(ctx.bound_replicas.begin(), ctx.bound_replicas.end());
        contexts->push_back(std::move(ctx));
      }
      out.push_back(std::move(m));
      stop = out.size() >= limit;
    };

    std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
      if (depth == n) {
        emit();
        return;
      }
      auto u = tree_order[depth];
      auto try_vertex = [&](VertexId v) {
        if (used[v] || !allowed[u][v]) return;
        for (auto w : back_edges[depth])
          if (!host.has_edge(v, mapping[w])) return;
        mapping[u] = v;
        used[v] = 1;
        dfs(depth + 1);
        used[v] = 0;
      };
      if (depth == 0) {
        for (auto v : filtered[u]) {
          try_vertex(v);
          if (stop) return;
        }
      } else {
        for (auto v : host.neighbors(mapping[parent[u]])) {
          try_vertex(v);
          if (stop) return;
        }
      }
    };
    dfs(0);
    if (stop) break;
  }
  return out;
}

/// Cross-partition matches through the replicated vertices of `start`.
///
/// The search runs on the union of the partitions within `hop_budget` PAG
/// hops of `start`. Each query vertex in turn (smallest candidate set first)
/// roots a BFS tree of the query; the root is seeded with the replicated
/// vertices of `start`. Candidates are filtered level by level down the tree
/// (a child keeps only vertices adjacent to some surviving parent candidate)
/// and then back up (a parent keeps only vertices with a surviving candidate
/// for every child). A DFS over the tree order then completes mappings,
/// checking non-tree edges against already mapped vertices. Only matches
/// whose edges belong to at least two partitions are returned, one per
/// distinct vertex set.
inline std::vector<Match> enumerate_inter(const QueryGraph &q, const PartitionSet &ps,
                                          const PAG &pag, PartitionId start,
                                          std::uint32_t hop_budget,
                                          std::size_t limit = kUnlimited,
                                          std::vector<BoundaryContext> *contexts = nullptr) {
  if (hop_budget == 0 || limit == 0 || q.edge_count() == 0 || ps[start].replicated.empty())
    return {};
  return enumerate_inter(q, ps, build_inter_region(ps, pag, start, hop_budget), limit, contexts);
}

}  // namespace divmatch
