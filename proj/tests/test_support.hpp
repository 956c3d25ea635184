//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used as test oracles. Nothing here
// calls into the code under test except the graph container itself.

#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "divmatch/graph.hpp"
#include "divmatch/match.hpp"

namespace divmatch::testing {

/// Def-style validity: injective, label-preserving, edge-preserving.
inline bool is_valid_match(const LabeledGraph &g, const LabeledGraph &q,
                           const std::vector<VertexId> &f) {
  if (f.size() != q.vertex_count()) return false;
  std::set<VertexId> image(f.begin(), f.end());
  if (image.size() != f.size()) return false;
  for (VertexId u = 0; u < q.vertex_count(); ++u) {
    if (f[u] >= g.vertex_count() || g.label(f[u]) != q.label(u)) return false;
    for (auto w : q.neighbors(u)) {
      bool found = false;
      for (auto x : g.neighbors(f[u])) found |= x == f[w];
      if (!found) return false;
    }
  }
  return true;
}

inline bool is_valid_match(const LabeledGraph &g, const LabeledGraph &q, const Match &m) {
  auto sorted = m.mapping;
  std::sort(sorted.begin(), sorted.end());
  return sorted == m.vertex_set && is_valid_match(g, q, m.mapping);
}

/// All-pairs hop distances; -1 for unreachable.
inline std::vector<std::vector<long>> floyd_warshall(const LabeledGraph &g) {
  const auto n = g.vertex_count();
  constexpr long kInf = 1L << 40;
  std::vector<std::vector<long>> d(n, std::vector<long>(n, kInf));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (auto w : g.neighbors(static_cast<VertexId>(i))) d[i][w] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  for (auto &row : d)
    for (auto &x : row)
      if (x >= kInf) x = -1;
  return d;
}

inline long as_long(HopCount h) { return h.reachable() ? long(h.value()) : -1; }

/// Permutation-based brute force: every injective assignment of query
/// vertices to label-compatible data vertices, checked edge by edge.
/// Returns distinct sorted vertex sets. Only for tiny instances.
inline std::set<std::vector<VertexId>> brute_force_sets(const LabeledGraph &g,
                                                        const LabeledGraph &q) {
  std::set<std::vector<VertexId>> out;
  std::vector<VertexId> f(q.vertex_count());
  std::vector<char> used(g.vertex_count(), 0);
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == q.vertex_count()) {
      if (is_valid_match(g, q, f)) {
        auto s = f;
        std::sort(s.begin(), s.end());
        out.insert(s);
      }
      return;
    }
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (used[v] || g.label(v) != q.label(static_cast<VertexId>(i))) continue;
      used[v] = 1;
      f[i] = v;
      go(i + 1);
      used[v] = 0;
    }
  };
  go(0);
  return out;
}

inline std::set<std::vector<VertexId>> vertex_sets(const std::vector<Match> &ms) {
  std::set<std::vector<VertexId>> out;
  for (const auto &m : ms) out.insert(m.vertex_set);
  return out;
}

inline LabeledGraph path_graph(std::size_t n, Label label = 0) {
  std::vector<Edge> e;
  for (VertexId i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return LabeledGraph(std::vector<Label>(n, label), e);
}

inline LabeledGraph complete_graph(std::size_t n, Label label = 0) {
  std::vector<Edge> e;
  for (VertexId i = 0; i < n; ++i)
    for (VertexId j = i + 1; j < n; ++j) e.push_back({i, j});
  return LabeledGraph(std::vector<Label>(n, label), e);
}

/// Connected random query: random spanning tree plus a few chords.
inline QueryGraph random_query(std::size_t n, std::size_t chords, Label labels,
                               std::mt19937_64 &rng) {
  std::vector<Label> ls(n);
  std::uniform_int_distribution<Label> pick(0, labels - 1);
  for (auto &l : ls) l = pick(rng);
  std::set<std::pair<VertexId, VertexId>> edges;
  for (VertexId v = 1; v < n; ++v) {
    std::uniform_int_distribution<VertexId> p(0, v - 1);
    edges.insert({p(rng), v});
  }
  std::uniform_int_distribution<VertexId> any(0, static_cast<VertexId>(n - 1));
  for (std::size_t c = 0; c < chords * 4 && edges.size() < n - 1 + chords; ++c) {
    auto a = any(rng), b = any(rng);
    if (a == b) continue;
    edges.insert({std::min(a, b), std::max(a, b)});
  }
  std::vector<Edge> e;
  for (auto [a, b] : edges) e.push_back({a, b});
  return QueryGraph(LabeledGraph(ls, e));
}

}  // namespace divmatch::testing
