//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "divmatch/graph.hpp"
#include "divmatch/parallel.hpp"

namespace divmatch {

using PartitionId = std::uint32_t;

/// Marks a match whose edges are spread over more than one partition.
inline constexpr PartitionId kCrossPartition =
    std::numeric_limits<PartitionId>::max();

/// Desired distinct-vertex count per partition.
struct TargetSize {
  std::size_t min = 1000;
  std::size_t max = 2000;

  bool operator==(const TargetSize &) const = default;

  /// Parses "min:max".
  static TargetSize parse(const std::string &text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("partition size must be <min>:<max>");
    TargetSize t;
    try {
      t.min = std::stoul(text.substr(0, colon));
      t.max = std::stoul(text.substr(colon + 1));
    } catch (const std::exception &) {
      throw std::invalid_argument("partition size must be <min>:<max>");
    }
    t.validate();
    return t;
  }

  void validate() const {
    if (min == 0 || max < min || max < 2)
      throw std::invalid_argument("invalid partition size range " +
                                  std::to_string(min) + ":" + std::to_string(max));
  }
};

/// One edge partition. `local` is the partition's own subgraph (its edges
/// only) on local ids, where local id i is global vertex vertices[i].
struct Partition {
  PartitionId id = 0;
  std::vector<VertexId> vertices;
  std::vector<Edge> edges;
  std::vector<VertexId> replicated;
  LabeledGraph local;

  VertexId to_global(VertexId local_id) const { return vertices.at(local_id); }

  std::optional<VertexId> to_local(VertexId global) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), global);
    if (it == vertices.end() || *it != global) return std::nullopt;
    return static_cast<VertexId>(it - vertices.begin());
  }

  bool contains(VertexId global) const {
    return std::binary_search(vertices.begin(), vertices.end(), global);
  }

  bool is_replicated(VertexId global) const {
    return std::binary_search(replicated.begin(), replicated.end(), global);
  }
};

/// Edge-disjoint partitions covering every data edge, with endpoint
/// replication.
class PartitionSet {
 public:
  PartitionSet() = default;

  /// Assembles partitions from per-partition edge groups over g. A group may
  /// also name vertices explicitly (used for isolated vertices).
  static PartitionSet from_groups(const LabeledGraph &g,
                                  std::vector<std::vector<Edge>> edge_groups,
                                  std::vector<std::vector<VertexId>> vertex_groups = {}) {
    vertex_groups.resize(edge_groups.size());
    PartitionSet ps;
    ps.data_vertex_count_ = g.vertex_count();
    ps.membership_.assign(g.vertex_count(), {});
    std::vector<std::pair<Edge, PartitionId>> owners;
    owners.reserve(g.edge_count());

    for (std::size_t i = 0; i < edge_groups.size(); ++i) {
      Partition p;
      p.id = static_cast<PartitionId>(i);
      p.edges = std::move(edge_groups[i]);
      for (auto &e : p.edges) {
        if (e.u > e.v) std::swap(e.u, e.v);
        if (!g.has_edge(e.u, e.v))
          throw ValidationError("partition edge " + std::to_string(e.u) + "-" +
                                std::to_string(e.v) + " is not a data edge");
        owners.push_back({e, p.id});
        p.vertices.push_back(e.u);
        p.vertices.push_back(e.v);
      }
      std::sort(p.edges.begin(), p.edges.end());
      for (auto v : vertex_groups[i]) {
        if (v >= g.vertex_count()) throw IndexError("partition vertex out of range");
        p.vertices.push_back(v);
      }
      std::sort(p.vertices.begin(), p.vertices.end());
      p.vertices.erase(std::unique(p.vertices.begin(), p.vertices.end()),
                       p.vertices.end());
      for (auto v : p.vertices) ps.membership_[v].push_back(p.id);
      ps.parts_.push_back(std::move(p));
    }

    std::sort(owners.begin(), owners.end());
    for (std::size_t i = 1; i < owners.size(); ++i)
      if (owners[i].first == owners[i - 1].first)
        throw ValidationError("edge assigned to two partitions");
    if (owners.size() != g.edge_count())
      throw ValidationError("partitions cover " + std::to_string(owners.size()) +
                            " of " + std::to_string(g.edge_count()) + " edges");
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (ps.membership_[v].empty())
        throw ValidationError("vertex " + std::to_string(v) + " is in no partition");
    ps.owners_ = std::move(owners);

    for (auto &p : ps.parts_) {
      std::vector<Label> labels;
      labels.reserve(p.vertices.size());
      for (auto v : p.vertices) {
        labels.push_back(g.label(v));
        if (ps.membership_[v].size() > 1) p.replicated.push_back(v);
      }
      std::vector<Edge> local_edges;
      local_edges.reserve(p.edges.size());
      for (const auto &e : p.edges) local_edges.push_back({*p.to_local(e.u), *p.to_local(e.v)});
      p.local = LabeledGraph(std::move(labels), local_edges);
    }
    return ps;
  }

  std::size_t size() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  const Partition &operator[](PartitionId i) const { return parts_.at(i); }
  const std::vector<Partition> &partitions() const { return parts_; }
  auto begin() const { return parts_.begin(); }
  auto end() const { return parts_.end(); }

  std::size_t data_vertex_count() const { return data_vertex_count_; }

  /// Partitions holding v, ascending.
  std::span<const PartitionId> partitions_of(VertexId v) const {
    return membership_.at(v);
  }

  /// Lowest-id partition holding v.
  PartitionId home(VertexId v) const { return membership_.at(v).front(); }

  PartitionId edge_owner(VertexId u, VertexId v) const {
    if (u > v) std::swap(u, v);
    auto it = std::lower_bound(owners_.begin(), owners_.end(),
                               std::pair<Edge, PartitionId>{{u, v}, 0});
    if (it == owners_.end() || it->first != Edge{u, v})
      throw IndexError("no edge " + std::to_string(u) + "-" + std::to_string(v));
    return it->second;
  }

 private:
  std::vector<Partition> parts_;
  std::vector<std::vector<PartitionId>> membership_;
  std::vector<std::pair<Edge, PartitionId>> owners_;
  std::size_t data_vertex_count_ = 0;
};

/// Neighbor-expansion edge partitioner. Each partition grows from the
/// lowest-id vertex that still has unassigned edges; it repeatedly expands
/// the boundary vertex with the fewest unassigned edges, assigning every
/// unassigned edge between newly reached vertices and the partition. A
/// partition closes once its vertex count reaches target.min, never exceeds
/// target.max, and only falls short when its connected component runs out
/// of edges. The seed drives tie-breaks between equally scored vertices.
/// Isolated vertices each get a partition of their own.
inline PartitionSet partition_graph(const LabeledGraph &g, TargetSize target,
                                    std::uint64_t seed) {
  target.validate();
  const auto n = g.vertex_count();
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> tiebreak(n);
  for (auto &t : tiebreak) t = rng();

  const auto comp = connected_components(g);
  std::vector<std::size_t> comp_remaining(n == 0 ? 0 : *std::max_element(comp.begin(), comp.end()) + 1, 0);
  std::vector<std::uint32_t> remaining(n);
  for (VertexId v = 0; v < n; ++v) {
    remaining[v] = g.degree(v);
    comp_remaining[comp[v]] += g.degree(v);
  }
  for (auto &c : comp_remaining) c /= 2;

  std::vector<char> assigned(2 * g.edge_count(), 0);
  auto is_assigned = [&](VertexId u, std::size_t nb_index) {
    return assigned[g.slot_begin(u) + nb_index] != 0;
  };

  // membership stamp: member[v] == group index + 1 while v is in the open group
  std::vector<std::uint32_t> member(n, 0);
  std::vector<std::vector<Edge>> groups;
  std::vector<std::vector<VertexId>> group_vertices;

  using Entry = std::tuple<std::uint32_t, std::uint64_t, VertexId>;
  VertexId scan = 0;
  auto next_seed = [&]() -> std::optional<VertexId> {
    while (scan < n && remaining[scan] == 0) ++scan;
    if (scan == n) return std::nullopt;
    return scan;
  };

  while (auto seed_vertex = next_seed()) {
    const auto stamp = static_cast<std::uint32_t>(groups.size() + 1);
    const auto c = comp[*seed_vertex];
    std::vector<Edge> edges;
    std::size_t size = 0;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

    auto join = [&](VertexId y) {
      member[y] = stamp;
      ++size;
      auto nb = g.neighbors(y);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        auto z = nb[i];
        if (member[z] != stamp || is_assigned(y, i)) continue;
        assigned[g.slot_begin(y) + i] = 1;
        assigned[g.edge_slot(z, y)] = 1;
        edges.push_back({std::min(y, z), std::max(y, z)});
        --remaining[y];
        --remaining[z];
        --comp_remaining[c];
        if (remaining[z] > 0) heap.push({remaining[z], tiebreak[z], z});
      }
      if (remaining[y] > 0) heap.push({remaining[y], tiebreak[y], y});
    };

    join(*seed_vertex);
    while (size < target.min) {
      std::optional<VertexId> x;
      while (!heap.empty()) {
        auto [score, tb, v] = heap.top();
        heap.pop();
        if (member[v] == stamp && remaining[v] == score && score > 0) {
          x = v;
          break;
        }
      }
      if (!x) {
        if (comp_remaining[c] == 0) break;
        VertexId r = 0;
        while (comp[r] != c || remaining[r] == 0) ++r;
        if (member[r] == stamp)
          heap.push({remaining[r], tiebreak[r], r});
        else
          join(r);
        continue;
      }
      auto nb = g.neighbors(*x);
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (is_assigned(*x, i)) continue;
        if (size >= target.max) break;
        join(nb[i]);
      }
    }
    groups.push_back(std::move(edges));
    group_vertices.emplace_back();
  }

  for (VertexId v = 0; v < n; ++v)
    if (g.degree(v) == 0) {
      groups.emplace_back();
      group_vertices.push_back({v});
    }
  return PartitionSet::from_groups(g, std::move(groups), std::move(group_vertices));
}

/// (Σ_i |V(P_i)|) / |V(G)|.
inline double replication_ratio(const PartitionSet &ps) {
  if (ps.data_vertex_count() == 0) return 0.0;
  std::size_t total = 0;
  for (const auto &p : ps) total += p.vertices.size();
  return double(total) / double(ps.data_vertex_count());
}

/// One node per partition; two partitions are adjacent when they share a
/// vertex.
class PartitionAdjacencyGraph {
 public:
  PartitionAdjacencyGraph() = default;
  explicit PartitionAdjacencyGraph(LabeledGraph graph) : graph_(std::move(graph)) {}

  std::size_t size() const { return graph_.vertex_count(); }
  bool adjacent(PartitionId a, PartitionId b) const { return graph_.has_edge(a, b); }
  std::span<const VertexId> neighbors(PartitionId p) const { return graph_.neighbors(p); }
  const LabeledGraph &graph() const { return graph_; }

 private:
  LabeledGraph graph_;
};

using PAG = PartitionAdjacencyGraph;

inline PAG build_pag(const PartitionSet &ps) {
  std::vector<Edge> edges;
  for (VertexId v = 0; v < ps.data_vertex_count(); ++v) {
    auto in = ps.partitions_of(v);
    for (std::size_t i = 0; i < in.size(); ++i)
      for (std::size_t j = i + 1; j < in.size(); ++j) edges.push_back({in[i], in[j]});
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return PAG(LabeledGraph(std::vector<Label>(ps.size(), 0), edges));
}

/// Symmetric n×n matrix of hop distances with zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), d_(n * n) {
    for (std::size_t i = 0; i < n; ++i) d_[i * n + i] = HopCount(0);
  }

  /// Rows of integers; negative entries mean unreachable.
  static DistanceMatrix from_rows(const std::vector<std::vector<long>> &rows) {
    DistanceMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size())
        throw std::invalid_argument("distance matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j)
        m.d_[i * m.n_ + j] = rows[i][j] < 0
                                 ? HopCount::unreachable()
                                 : HopCount(static_cast<std::uint32_t>(rows[i][j]));
    }
    for (std::size_t i = 0; i < m.n_; ++i)
      for (std::size_t j = 0; j < m.n_; ++j)
        if (m.at(i, j) != m.at(j, i) || (i == j && m.at(i, i) != HopCount(0)))
          throw std::invalid_argument("distance matrix must be symmetric with zero diagonal");
    return m;
  }

  std::size_t size() const { return n_; }
  HopCount at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw IndexError("distance matrix index out of range");
    return d_[i * n_ + j];
  }
  void set_row(std::size_t i, std::span<const HopCount> row) {
    std::copy(row.begin(), row.end(), d_.begin() + static_cast<std::ptrdiff_t>(i * n_));
  }

  /// Largest finite entry.
  std::uint32_t diameter() const {
    std::uint32_t best = 0;
    for (auto h : d_)
      if (h.reachable()) best = std::max(best, h.value());
    return best;
  }

  bool operator==(const DistanceMatrix &) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<HopCount> d_;
};

/// All-pairs PAG hop distances by one BFS per node.
inline DistanceMatrix pag_distances(const PAG &pag, std::size_t threads = 1) {
  DistanceMatrix m(pag.size());
  std::vector<std::vector<HopCount>> rows(pag.size());
  parallel_for(pag.size(), threads, [&](std::size_t i) {
    rows[i] = bfs_distances(pag.graph(), static_cast<VertexId>(i));
  });
  for (std::size_t i = 0; i < rows.size(); ++i) m.set_row(i, rows[i]);
  return m;
}

}  // namespace divmatch
