//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace divmatch {

using VertexId = std::uint32_t;
using Label = std::uint32_t;

/// Raised for malformed graph text (bad tokens, out-of-range ids).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a structurally well-formed graph violates an invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Unweighted shortest-path length. Unreachable is a distinct state that
/// orders above every finite hop count; it cannot be read as a number.
class HopCount {
 public:
  constexpr HopCount() = default;
  constexpr explicit HopCount(std::uint32_t hops) : raw_(hops) {
    if (hops == kUnreachableRaw)
      throw std::overflow_error("hop count out of range");
  }

  static constexpr HopCount unreachable() { return HopCount(Raw{}); }

  constexpr bool reachable() const { return raw_ != kUnreachableRaw; }

  constexpr std::uint32_t value() const {
    if (!reachable()) throw std::logic_error("value() on unreachable hop count");
    return raw_;
  }

  constexpr auto operator<=>(const HopCount &) const = default;

  std::string to_string() const {
    return reachable() ? std::to_string(raw_) : std::string("unreachable");
  }

 private:
  struct Raw {};
  static constexpr std::uint32_t kUnreachableRaw =
      std::numeric_limits<std::uint32_t>::max();
  constexpr explicit HopCount(Raw) : raw_(kUnreachableRaw) {}

  std::uint32_t raw_ = kUnreachableRaw;
};

struct Edge {
  VertexId u;
  VertexId v;

  auto operator<=>(const Edge &) const = default;
};

/// Immutable undirected vertex-labeled graph in CSR form. Neighbor lists are
/// sorted; no self-loops or parallel edges.
class LabeledGraph {
 public:
  LabeledGraph() : offsets_(1, 0) {}

  /// Builds from per-vertex labels and an undirected edge list. Each edge may
  /// be given in either orientation but only once.
  LabeledGraph(std::vector<Label> labels, std::span<const Edge> edges)
      : labels_(std::move(labels)) {
    const auto n = labels_.size();
    std::vector<std::uint32_t> deg(n, 0);
    for (const auto &e : edges) {
      if (e.u >= n || e.v >= n)
        throw IndexError("edge endpoint out of range: " + std::to_string(e.u) +
                         " " + std::to_string(e.v));
      if (e.u == e.v)
        throw ValidationError("self-loop on vertex " + std::to_string(e.u));
      ++deg[e.u];
      ++deg[e.v];
    }
    offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto &e : edges) {
      adjacency_[fill[e.u]++] = e.v;
      adjacency_[fill[e.v]++] = e.u;
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto first = adjacency_.begin() + offsets_[i];
      auto last = adjacency_.begin() + offsets_[i + 1];
      std::sort(first, last);
      if (std::adjacent_find(first, last) != last)
        throw ValidationError("duplicate edge at vertex " + std::to_string(i));
    }
    edge_count_ = edges.size();
    for (auto l : labels_) label_bound_ = std::max(label_bound_, l + 1);
  }

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  bool empty() const { return labels_.empty(); }

  Label label(VertexId v) const { return labels_[check(v)]; }
  std::span<const Label> labels() const { return labels_; }
  /// One past the largest label in use (0 for an empty graph).
  Label label_bound() const { return label_bound_; }

  std::uint32_t degree(VertexId v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  std::span<const VertexId> neighbors(VertexId v) const {
    check(v);
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  bool has_edge(VertexId u, VertexId v) const {
    auto a = neighbors(u);
    auto b = neighbors(v);
    if (a.size() > b.size()) std::swap(a, b), std::swap(u, v);
    return std::binary_search(a.begin(), a.end(), v);
  }

  /// Position of v inside u's neighbor list, usable as a per-direction edge
  /// slot index into a vector of size 2·|E|.
  std::size_t edge_slot(VertexId u, VertexId v) const {
    auto nb = neighbors(u);
    auto it = std::lower_bound(nb.begin(), nb.end(), v);
    if (it == nb.end() || *it != v)
      throw IndexError("no edge " + std::to_string(u) + "-" + std::to_string(v));
    return offsets_[u] + static_cast<std::size_t>(it - nb.begin());
  }
  std::size_t slot_begin(VertexId v) const { return offsets_[check(v)]; }

  /// Undirected edges with u < v, in (u, v) order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (VertexId u = 0; u < vertex_count(); ++u)
      for (auto v : neighbors(u))
        if (u < v) out.push_back({u, v});
    return out;
  }

  bool operator==(const LabeledGraph &o) const {
    return labels_ == o.labels_ && offsets_ == o.offsets_ &&
           adjacency_ == o.adjacency_;
  }

 private:
  VertexId check(VertexId v) const {
    if (v >= labels_.size())
      throw IndexError("vertex id " + std::to_string(v) + " out of range");
    return v;
  }

  std::vector<Label> labels_;
  std::vector<std::uint32_t> offsets_;
  std::vector<VertexId> adjacency_;
  std::size_t edge_count_ = 0;
  Label label_bound_ = 0;
};

// ---------------------------------------------------------------------------
// Traversal

inline std::vector<HopCount> multi_source_bfs(const LabeledGraph &g,
                                              std::span<const VertexId> sources);

/// Single-source BFS; entry v holds dist(source, v).
inline std::vector<HopCount> bfs_distances(const LabeledGraph &g,
                                           VertexId source) {
  const VertexId sources[] = {source};
  return multi_source_bfs(g, sources);
}

inline HopCount bfs_distance(const LabeledGraph &g, VertexId source,
                             VertexId target) {
  if (source >= g.vertex_count() || target >= g.vertex_count())
    throw IndexError("bfs endpoint out of range");
  if (source == target) return HopCount(0);
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<VertexId> frontier{source}, next;
  seen[source] = 1;
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (auto u : frontier)
      for (auto w : g.neighbors(u)) {
        if (seen[w]) continue;
        if (w == target) return HopCount(level);
        seen[w] = 1;
        next.push_back(w);
      }
    frontier.swap(next);
  }
  return HopCount::unreachable();
}

/// Distance from the nearest source to every vertex.
inline std::vector<HopCount> multi_source_bfs(const LabeledGraph &g,
                                              std::span<const VertexId> sources) {
  if (sources.empty()) throw std::invalid_argument("multi_source_bfs: no sources");
  std::vector<HopCount> dist(g.vertex_count());
  std::vector<VertexId> frontier, next;
  for (auto s : sources) {
    if (s >= g.vertex_count())
      throw IndexError("bfs source " + std::to_string(s) + " out of range");
    if (!dist[s].reachable()) {
      dist[s] = HopCount(0);
      frontier.push_back(s);
    }
  }
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    next.clear();
    for (auto u : frontier)
      for (auto w : g.neighbors(u))
        if (!dist[w].reachable()) {
          dist[w] = HopCount(level);
          next.push_back(w);
        }
    frontier.swap(next);
  }
  return dist;
}

/// Component id per vertex, numbered in order of lowest member id.
inline std::vector<std::uint32_t> connected_components(const LabeledGraph &g) {
  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(g.vertex_count(), kNone);
  std::uint32_t next_id = 0;
  std::vector<VertexId> stack;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = next_id;
    stack.push_back(s);
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto w : g.neighbors(u))
        if (comp[w] == kNone) {
          comp[w] = next_id;
          stack.push_back(w);
        }
    }
    ++next_id;
  }
  return comp;
}

inline bool is_connected(const LabeledGraph &g) {
  if (g.vertex_count() <= 1) return true;
  auto comp = connected_components(g);
  return std::all_of(comp.begin(), comp.end(), [](auto c) { return c == 0; });
}

/// Subgraph induced by `vertices` (global ids), relabeled 0..n-1 in the given
/// order.
inline LabeledGraph induced_subgraph(const LabeledGraph &g,
                                     std::span<const VertexId> vertices) {
  std::vector<Label> labels;
  labels.reserve(vertices.size());
  std::vector<std::pair<VertexId, VertexId>> index;  // global -> local
  index.reserve(vertices.size());
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    labels.push_back(g.label(vertices[i]));
    index.emplace_back(vertices[i], static_cast<VertexId>(i));
  }
  std::sort(index.begin(), index.end());
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (auto w : g.neighbors(vertices[i])) {
      auto it = std::lower_bound(index.begin(), index.end(),
                                 std::pair<VertexId, VertexId>{w, 0});
      if (it != index.end() && it->first == w && i < it->second)
        edges.push_back({static_cast<VertexId>(i), it->second});
    }
  return LabeledGraph(std::move(labels), edges);
}

// ---------------------------------------------------------------------------
// Query graphs

inline constexpr std::size_t kDefaultMaxQueryVertices = 20;

/// A connected labeled graph small enough to serve as a pattern.
class QueryGraph : public LabeledGraph {
 public:
  QueryGraph() = default;

  explicit QueryGraph(LabeledGraph g,
                      std::size_t max_vertices = kDefaultMaxQueryVertices)
      : LabeledGraph(std::move(g)) {
    if (vertex_count() == 0) throw ValidationError("query graph is empty");
    if (vertex_count() > max_vertices)
      throw ValidationError("query has " + std::to_string(vertex_count()) +
                            " vertices, maximum is " +
                            std::to_string(max_vertices));
    if (!is_connected(*this)) throw ValidationError("query graph is disconnected");
  }

  bool connected() const { return true; }
};

}  // namespace divmatch
