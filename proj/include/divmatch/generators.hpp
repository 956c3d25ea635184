//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <set>
#include <unordered_set>
#include <vector>

#include "divmatch/graph.hpp"

namespace divmatch::gen {

inline std::vector<Label> uniform_labels(std::size_t n, Label label_count,
                                         std::mt19937_64 &rng) {
  std::uniform_int_distribution<Label> pick(0, label_count - 1);
  std::vector<Label> labels(n);
  for (auto &l : labels) l = pick(rng);
  return labels;
}

namespace detail {
inline std::uint64_t edge_key(VertexId u, VertexId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}
}  // namespace detail

/// G(n, m) with m = round(n·avg_degree/2) distinct edges.
inline LabeledGraph erdos_renyi(std::size_t n, double avg_degree,
                                Label label_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto labels = uniform_labels(n, label_count, rng);
  const auto max_edges = n * (n - 1) / 2;
  auto m = std::min<std::size_t>(
      max_edges, static_cast<std::size_t>(std::llround(n * avg_degree / 2.0)));
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  while (edges.size() < m) {
    auto u = pick(rng), v = pick(rng);
    if (u == v || !seen.insert(detail::edge_key(u, v)).second) continue;
    edges.push_back({u, v});
  }
  return LabeledGraph(std::move(labels), edges);
}

/// Random spanning tree plus `extra_edges` random chords: always connected.
inline LabeledGraph random_connected(std::size_t n, std::size_t extra_edges,
                                     Label label_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto labels = uniform_labels(n, label_count, rng);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  for (VertexId v = 1; v < n; ++v) {
    std::uniform_int_distribution<VertexId> parent(0, v - 1);
    auto u = parent(rng);
    seen.insert(detail::edge_key(u, v));
    edges.push_back({u, v});
  }
  const auto max_edges = n * (n - 1) / 2;
  extra_edges = std::min(extra_edges, max_edges - edges.size());
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(n - 1));
  for (std::size_t added = 0; added < extra_edges;) {
    auto u = pick(rng), v = pick(rng);
    if (u == v || !seen.insert(detail::edge_key(u, v)).second) continue;
    edges.push_back({u, v});
    ++added;
  }
  return LabeledGraph(std::move(labels), edges);
}

/// Random geometric graph in the unit square: vertices within radius r are
/// adjacent, with r chosen for the requested expected degree. Components are
/// then stitched to their geometrically nearest outside vertex so the result
/// is connected. These graphs have large diameter, like road or contact
/// networks.
inline LabeledGraph random_geometric(std::size_t n, double avg_degree,
                                     Label label_count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = unit(rng), ys[i] = unit(rng);
  auto labels = uniform_labels(n, label_count, rng);

  const double r = std::sqrt(avg_degree / (std::numbers::pi * double(n)));
  const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(1.0 / r));
  auto cell_of = [&](double c) {
    return std::min(cells - 1, static_cast<std::size_t>(c * double(cells)));
  };
  std::vector<std::vector<VertexId>> grid(cells * cells);
  for (VertexId i = 0; i < n; ++i)
    grid[cell_of(ys[i]) * cells + cell_of(xs[i])].push_back(i);

  auto dist2 = [&](VertexId a, VertexId b) {
    double dx = xs[a] - xs[b], dy = ys[a] - ys[b];
    return dx * dx + dy * dy;
  };
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i) {
    auto cx = cell_of(xs[i]), cy = cell_of(ys[i]);
    for (std::size_t gy = cy == 0 ? 0 : cy - 1; gy <= std::min(cells - 1, cy + 1); ++gy)
      for (std::size_t gx = cx == 0 ? 0 : cx - 1; gx <= std::min(cells - 1, cx + 1); ++gx)
        for (auto j : grid[gy * cells + gx])
          if (i < j && dist2(i, j) <= r * r) edges.push_back({i, j});
  }

  while (true) {
    LabeledGraph g(labels, edges);
    auto comp = connected_components(g);
    auto components = *std::max_element(comp.begin(), comp.end()) + 1;
    if (components <= 1) return g;
    // Join every component other than 0 to its nearest vertex outside it.
    std::vector<std::pair<double, Edge>> best(components,
                                              {std::numeric_limits<double>::max(), {}});
    for (VertexId a = 0; a < n; ++a)
      if (comp[a] != 0)
        for (VertexId b = 0; b < n; ++b)
          if (comp[b] != comp[a]) {
            auto d = dist2(a, b);
            if (d < best[comp[a]].first) best[comp[a]] = {d, Edge{a, b}};
          }
    std::set<std::uint64_t> added;
    for (std::uint32_t c = 1; c < components; ++c) {
      auto e = best[c].second;
      if (added.insert(detail::edge_key(e.u, e.v)).second) edges.push_back(e);
    }
  }
}

}  // namespace divmatch::gen
