//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "divmatch/graph.hpp"

namespace divmatch {

using FeatureVector = std::vector<double>;

inline constexpr std::size_t kDefaultLabelSlots = 32;

/// Maps labels to a fixed number of feature slots. The most frequent labels
/// of the data graph get their own slot; every other label shares a final
/// overflow slot, which keeps counts monotone under containment.
class LabelDictionary {
 public:
  LabelDictionary() = default;
  explicit LabelDictionary(std::vector<Label> slots) : slots_(std::move(slots)) { index(); }

  static LabelDictionary from_graph(const LabeledGraph &g,
                                    std::size_t capacity = kDefaultLabelSlots) {
    std::map<Label, std::size_t> freq;
    for (auto l : g.labels()) ++freq[l];
    std::vector<std::pair<std::size_t, Label>> order;
    for (auto [l, c] : freq) order.push_back({c, l});
    std::stable_sort(order.begin(), order.end(),
                     [](auto &a, auto &b) { return a.first > b.first; });
    std::vector<Label> slots;
    for (std::size_t i = 0; i < order.size() && i < capacity; ++i) slots.push_back(order[i].second);
    return LabelDictionary(std::move(slots));
  }

  /// Slot for a label; unknown labels land in the overflow slot.
  std::size_t slot(Label l) const {
    auto it = lookup_.find(l);
    return it == lookup_.end() ? slots_.size() : it->second;
  }
  std::size_t slot_count() const { return slots_.size() + 1; }
  const std::vector<Label> &labels() const { return slots_; }
  bool operator==(const LabelDictionary &o) const { return slots_ == o.slots_; }

 private:
  void index() {
    lookup_.clear();
    for (std::size_t i = 0; i < slots_.size(); ++i) lookup_[slots_[i]] = i;
  }

  std::vector<Label> slots_;
  std::map<Label, std::size_t> lookup_;
};

/// Degree thresholds t for the "vertices with degree ≥ t" features.
inline const std::vector<std::uint32_t> &degree_thresholds() {
  static const std::vector<std::uint32_t> t{1, 2, 3, 4, 5, 6, 8, 12, 16};
  return t;
}

inline std::size_t feature_dim(const LabelDictionary &dict) {
  return 2 + dict.slot_count() + degree_thresholds().size() + 3;
}

inline std::vector<std::string> feature_names(const LabelDictionary &dict) {
  std::vector<std::string> n{"vertices", "edges"};
  for (auto l : dict.labels()) n.push_back("label_" + std::to_string(l));
  n.push_back("label_other");
  for (auto t : degree_thresholds()) n.push_back("deg_ge_" + std::to_string(t));
  n.insert(n.end(), {"triangles", "max_core", "max_degree"});
  return n;
}

inline std::uint64_t triangle_count(const LabeledGraph &g) {
  std::uint64_t count = 0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    auto nu = g.neighbors(u);
    for (auto v : nu) {
      if (v <= u) continue;
      auto nv = g.neighbors(v);
      // common neighbors w > v
      auto a = std::upper_bound(nu.begin(), nu.end(), v);
      auto b = std::upper_bound(nv.begin(), nv.end(), v);
      while (a != nu.end() && b != nv.end()) {
        if (*a < *b) ++a;
        else if (*b < *a) ++b;
        else ++count, ++a, ++b;
      }
    }
  }
  return count;
}

/// Largest k such that the graph has a nonempty k-core (bucket peeling).
inline std::uint32_t max_core_number(const LabeledGraph &g) {
  const auto n = g.vertex_count();
  if (n == 0) return 0;
  std::vector<std::uint32_t> deg(n);
  std::uint32_t max_deg = 0;
  for (VertexId v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v] = g.degree(v));
  std::vector<std::vector<VertexId>> bucket(max_deg + 1);
  for (VertexId v = 0; v < n; ++v) bucket[deg[v]].push_back(v);
  std::vector<char> removed(n, 0);
  std::uint32_t core = 0;
  std::size_t done = 0;
  for (std::uint32_t d = 0; done < n;) {
    if (bucket[d].empty()) {
      ++d;
      continue;
    }
    auto v = bucket[d].back();
    bucket[d].pop_back();
    if (removed[v] || deg[v] != d) continue;
    removed[v] = 1;
    ++done;
    core = std::max(core, d);
    for (auto w : g.neighbors(v))
      if (!removed[w] && deg[w] > d) {
        --deg[w];
        bucket[deg[w]].push_back(w);
      }
  }
  return core;
}

/// Structural statistics that can only grow when passing from a graph to any
/// graph containing it: counts of vertices, edges, vertices per label slot,
/// vertices with degree at least each threshold, triangles, the largest core
/// number and the largest degree.
inline FeatureVector extract_features(const LabeledGraph &g, const LabelDictionary &dict) {
  FeatureVector f(feature_dim(dict), 0.0);
  std::size_t i = 0;
  f[i++] = double(g.vertex_count());
  f[i++] = double(g.edge_count());
  for (auto l : g.labels()) f[i + dict.slot(l)] += 1.0;
  i += dict.slot_count();
  std::uint32_t max_degree = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto d = g.degree(v);
    max_degree = std::max(max_degree, d);
    for (std::size_t t = 0; t < degree_thresholds().size(); ++t)
      if (d >= degree_thresholds()[t]) f[i + t] += 1.0;
  }
  i += degree_thresholds().size();
  f[i++] = double(triangle_count(g));
  f[i++] = double(max_core_number(g));
  f[i++] = double(max_degree);
  return f;
}

/// Componentwise a ≤ b.
inline bool dominated(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

}  // namespace divmatch
