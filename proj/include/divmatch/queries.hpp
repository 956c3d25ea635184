//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "divmatch/diversity.hpp"
#include "divmatch/graph.hpp"

namespace divmatch {

class GenerationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// simple: paths and cycles; common: two walks fused at a shared vertex;
/// complex: dense cores of local neighborhoods.
enum class QueryKind { simple, common, complex };

inline const char *to_string(QueryKind k) {
  switch (k) {
    case QueryKind::simple: return "simple";
    case QueryKind::common: return "common";
    case QueryKind::complex: return "complex";
  }
  return "?";
}

inline QueryKind parse_query_kind(const std::string &s) {
  if (s == "simple") return QueryKind::simple;
  if (s == "common") return QueryKind::common;
  if (s == "complex") return QueryKind::complex;
  throw std::invalid_argument("unknown query kind '" + s + "'");
}

/// Edge density 2m / (n(n−1)); 0 for fewer than two vertices.
inline double edge_density(const LabeledGraph &g) {
  const double n = double(g.vertex_count());
  return n < 2 ? 0.0 : 2.0 * double(g.edge_count()) / (n * (n - 1));
}

namespace detail {

/// Builds a pattern from data-graph vertices and a subset of the data edges
/// among them. Vertices are renumbered in the order given.
inline LabeledGraph pattern_from(const LabeledGraph &g, const std::vector<VertexId> &vertices,
                                 const std::vector<Edge> &edges) {
  std::vector<Label> labels;
  for (auto v : vertices) labels.push_back(g.label(v));
  auto local = [&](VertexId v) {
    return static_cast<VertexId>(std::find(vertices.begin(), vertices.end(), v) -
                                 vertices.begin());
  };
  std::vector<Edge> out;
  for (const auto &e : edges) out.push_back({local(e.u), local(e.v)});
  return LabeledGraph(std::move(labels), out);
}

/// Self-avoiding random walk of up to `steps` steps from `start`, appended
/// to `vertices`/`edges` (vertices already present are avoided too).
inline void walk(const LabeledGraph &g, VertexId start, std::size_t steps,
                 std::vector<VertexId> &vertices, std::vector<Edge> &edges,
                 std::mt19937_64 &rng) {
  if (std::find(vertices.begin(), vertices.end(), start) == vertices.end())
    vertices.push_back(start);
  VertexId at = start;
  for (std::size_t s = 0; s < steps; ++s) {
    std::vector<VertexId> fresh;
    for (auto w : g.neighbors(at))
      if (std::find(vertices.begin(), vertices.end(), w) == vertices.end()) fresh.push_back(w);
    if (fresh.empty()) return;
    auto next = fresh[std::uniform_int_distribution<std::size_t>(0, fresh.size() - 1)(rng)];
    vertices.push_back(next);
    edges.push_back({at, next});
    at = next;
  }
}

}  // namespace detail

/// One query of the given kind grown around `start`, as a pattern that
/// occurs in g by construction. Returns nullopt when the neighborhood is too
/// small to produce an edge.
inline std::optional<LabeledGraph> grow_query(const LabeledGraph &g, QueryKind kind,
                                              VertexId start, std::size_t max_vertices,
                                              std::mt19937_64 &rng) {
  if (max_vertices < 2 || g.degree(start) == 0) return std::nullopt;
  std::vector<VertexId> vs;
  std::vector<Edge> es;
  switch (kind) {
    case QueryKind::simple: {
      auto n = std::uniform_int_distribution<std::size_t>(2, max_vertices)(rng);
      detail::walk(g, start, n - 1, vs, es, rng);
      if (vs.size() >= 3 && g.has_edge(vs.front(), vs.back()) && rng() % 2 == 0)
        es.push_back({vs.back(), vs.front()});
      break;
    }
    case QueryKind::common: {
      auto n = std::uniform_int_distribution<std::size_t>(std::min<std::size_t>(3, max_vertices),
                                                          max_vertices)(rng);
      auto first = (n + 1) / 2;
      detail::walk(g, start, first - 1, vs, es, rng);
      // The second walk leaves from a vertex of the first, so the two share
      // at least that vertex; edges it closes onto the first walk are kept.
      auto fork = vs[std::uniform_int_distribution<std::size_t>(0, vs.size() - 1)(rng)];
      auto before = vs.size();
      detail::walk(g, fork, n - before, vs, es, rng);
      for (std::size_t i = before; i < vs.size(); ++i)
        for (std::size_t j = 0; j < before; ++j)
          if (g.has_edge(vs[i], vs[j]) &&
              std::find(es.begin(), es.end(), Edge{vs[i], vs[j]}) == es.end() &&
              std::find(es.begin(), es.end(), Edge{vs[j], vs[i]}) == es.end() &&
              rng() % 2 == 0)
            es.push_back({vs[i], vs[j]});
      break;
    }
    case QueryKind::complex: {
      // Two-hop neighborhood, capped, then peel minimum-degree vertices
      // (periphery first on ties) and keep the remainder of highest edge
      // density with at least four vertices and at most max_vertices.
      std::vector<VertexId> ball{start};
      std::vector<int> depth{0};
      const std::size_t cap = 4 * max_vertices;
      for (std::size_t i = 0; i < ball.size() && ball.size() < cap; ++i) {
        if (depth[i] == 2) break;
        auto nb = g.neighbors(ball[i]);
        std::vector<VertexId> order(nb.begin(), nb.end());
        std::shuffle(order.begin(), order.end(), rng);
        for (auto w : order)
          if (ball.size() < cap && std::find(ball.begin(), ball.end(), w) == ball.end()) {
            ball.push_back(w);
            depth.push_back(depth[i] + 1);
          }
      }
      auto sub = induced_subgraph(g, ball);
      std::vector<char> alive(ball.size(), 1);
      std::vector<std::uint32_t> deg(ball.size());
      for (VertexId v = 0; v < ball.size(); ++v) deg[v] = sub.degree(v);
      std::size_t n = ball.size(), m = sub.edge_count();
      const std::size_t smallest = std::min<std::size_t>({4, ball.size(), max_vertices});
      std::vector<char> best;
      double best_density = -1;
      while (n >= smallest && n >= 2) {
        if (n <= max_vertices) {
          std::vector<VertexId> keep;
          for (VertexId v = 0; v < ball.size(); ++v)
            if (alive[v]) keep.push_back(v);
          double d = 2.0 * double(m) / (double(n) * double(n - 1));
          if (d > best_density && is_connected(induced_subgraph(sub, keep)))
            best_density = d, best = alive;
        }
        VertexId low = 0;
        bool found = false;
        for (VertexId v = 0; v < ball.size(); ++v)
          if (alive[v] && (!found || deg[v] <= deg[low])) low = v, found = true;
        alive[low] = 0;
        --n;
        m -= deg[low];
        for (auto w : sub.neighbors(low))
          if (alive[w]) --deg[w];
      }
      if (best.empty()) return std::nullopt;
      for (VertexId v = 0; v < ball.size(); ++v)
        if (best[v]) vs.push_back(ball[v]);
      for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
          if (g.has_edge(vs[i], vs[j])) es.push_back({vs[i], vs[j]});
      break;
    }
  }
  if (es.empty()) return std::nullopt;
  return detail::pattern_from(g, vs, es);
}

/// `count` queries of one kind, each confirmed to have a match by the
/// oracle. Throws GenerationFailed after 50·count fruitless attempts.
inline std::vector<QueryGraph> generate_queries(const LabeledGraph &g, QueryKind kind,
                                                std::size_t count,
                                                std::size_t max_vertices = kDefaultMaxQueryVertices,
                                                std::uint64_t seed = 1) {
  if (g.vertex_count() == 0) throw ValidationError("cannot generate queries on an empty graph");
  if (max_vertices < 2) throw std::invalid_argument("max_vertices must be at least 2");
  std::vector<VertexId> starts;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (g.degree(v) > 0) starts.push_back(v);
  if (starts.empty()) throw GenerationFailed("graph has no edges");
  std::mt19937_64 rng(seed);
  std::vector<QueryGraph> out;
  OracleLimits limits;
  limits.max_steps = 5'000'000;
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries >= 50 * count)
      throw GenerationFailed("generated " + std::to_string(out.size()) + " of " +
                             std::to_string(count) + " " + to_string(kind) + " queries");
    auto start = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
    auto q = grow_query(g, kind, start, max_vertices, rng);
    if (!q || !is_connected(*q)) continue;
    try {
      if (!oracle_first_match(g, *q, limits)) continue;
    } catch (const CapExceeded &) {
      continue;
    }
    out.emplace_back(std::move(*q), max_vertices);
  }
  return out;
}

}  // namespace divmatch
