//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "divmatch/match.hpp"
#include "divmatch/parallel.hpp"
#include "divmatch/partition.hpp"

namespace divmatch {

class InsufficientPartitions : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-min dispersion over the PAG distance matrix, restricted to `pool`
/// (all partitions when empty). Starts at `first`; every later pick has the
/// largest minimum distance to those already chosen, unreachable counting as
/// farthest, ties to the lowest id.
inline std::vector<PartitionId> greedy_dispersion_from(const DistanceMatrix &D, std::size_t k,
                                                       PartitionId first,
                                                       std::span<const PartitionId> pool = {}) {
  std::vector<PartitionId> candidates(pool.begin(), pool.end());
  if (candidates.empty())
    for (PartitionId i = 0; i < D.size(); ++i) candidates.push_back(i);
  std::sort(candidates.begin(), candidates.end());
  if (k > candidates.size())
    throw InsufficientPartitions("asked for " + std::to_string(k) + " partitions, only " +
                                 std::to_string(candidates.size()) + " available");
  if (k == 0) return {};
  if (!std::binary_search(candidates.begin(), candidates.end(), first))
    throw std::invalid_argument("start partition is not a candidate");

  std::vector<PartitionId> chosen{first};
  std::vector<HopCount> to_set(candidates.size());
  std::vector<char> taken(candidates.size(), 0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    to_set[i] = D.at(first, candidates[i]);
    taken[i] = candidates[i] == first;
  }
  while (chosen.size() < k) {
    std::size_t best = candidates.size();
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (!taken[i] && (best == candidates.size() || to_set[i] > to_set[best])) best = i;
    taken[best] = 1;
    chosen.push_back(candidates[best]);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      to_set[i] = std::min(to_set[i], D.at(candidates[best], candidates[i]));
  }
  return chosen;
}

/// As greedy_dispersion_from, with the first partition drawn from the seed.
inline std::vector<PartitionId> greedy_dispersion_select(const DistanceMatrix &D, std::size_t k,
                                                         std::uint64_t seed) {
  if (k > D.size())
    throw InsufficientPartitions("asked for " + std::to_string(k) + " partitions, only " +
                                 std::to_string(D.size()) + " available");
  if (k == 0) return {};
  std::mt19937_64 rng(seed);
  auto first = std::uniform_int_distribution<PartitionId>(
      0, static_cast<PartitionId>(D.size() - 1))(rng);
  return greedy_dispersion_from(D, k, first);
}

/// Graph over candidate partitions with an edge between every reachable,
/// PAG-non-adjacent pair, weighted by PAG distance minus one.
class PartitionDistanceGraph {
 public:
  PartitionDistanceGraph() = default;

  PartitionDistanceGraph(std::vector<PartitionId> nodes, const DistanceMatrix &D)
      : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end());
    nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
    const auto n = nodes_.size();
    weight_.assign(n * n, 0);
    degree_.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        auto d = D.at(nodes_[i], nodes_[j]);
        if (i != j && d.reachable() && d.value() >= 2) {
          weight_[i * n + j] = d.value() - 1;
          ++degree_[i];
        }
      }
  }

  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  const std::vector<PartitionId> &nodes() const { return nodes_; }
  PartitionId partition(std::size_t i) const { return nodes_.at(i); }

  std::optional<std::size_t> index_of(PartitionId p) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), p);
    if (it == nodes_.end() || *it != p) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  /// Node-index accessors; 0 means no edge.
  std::uint32_t weight(std::size_t i, std::size_t j) const { return weight_[i * size() + j]; }
  bool has_edge(std::size_t i, std::size_t j) const { return weight(i, j) != 0; }
  std::uint32_t degree(std::size_t i) const { return degree_.at(i); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (auto d : degree_) twice += d;
    return twice / 2;
  }

 private:
  std::vector<PartitionId> nodes_;
  std::vector<std::uint32_t> weight_;
  std::vector<std::uint32_t> degree_;
};

using PDG = PartitionDistanceGraph;

inline PDG build_pdg(std::vector<PartitionId> candidates, const DistanceMatrix &D) {
  return PDG(std::move(candidates), D);
}

/// How DekPS scores a common neighbor against the nodes chosen so far.
/// `heaviest_edge` takes the largest edge weight into the chosen set;
/// `lightest_edge` takes the smallest, so a pick is never close to any
/// chosen node.
enum class DekpsPick { heaviest_edge, lightest_edge };

inline const char *to_string(DekpsPick p) {
  return p == DekpsPick::heaviest_edge ? "heaviest" : "lightest";
}

inline DekpsPick parse_dekps_pick(const std::string &s) {
  if (s == "heaviest") return DekpsPick::heaviest_edge;
  if (s == "lightest") return DekpsPick::lightest_edge;
  throw std::invalid_argument("unknown DekPS pick rule '" + s + "' (heaviest or lightest)");
}

/// Order in which DekPS visits PDG nodes. The seed is the node of largest
/// degree; each later node is a common neighbor of everything chosen so far
/// with the best score under `pick` (ties: higher degree, then lower
/// partition id; the lightest rule first breaks ties by heaviest edge). Stops when no common neighbor is left
/// or `max_nodes` are chosen. Returns node indices.
inline std::vector<std::size_t> dekps_sequence(const PDG &pdg, std::size_t max_nodes,
                                               DekpsPick pick = DekpsPick::lightest_edge) {
  std::vector<std::size_t> seq;
  const auto n = pdg.size();
  if (n == 0 || max_nodes == 0) return seq;
  std::size_t seed = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (pdg.degree(i) > pdg.degree(seed)) seed = i;
  seq.push_back(seed);
  std::vector<char> common(n, 0);
  std::vector<std::uint32_t> heaviest(n, 0), lightest(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    common[c] = pdg.has_edge(seed, c);
    heaviest[c] = lightest[c] = pdg.weight(seed, c);
  }
  const bool by_max = pick == DekpsPick::heaviest_edge;
  auto key = [&](std::size_t c) {
    return by_max ? std::tuple(heaviest[c], 0u, pdg.degree(c))
                  : std::tuple(lightest[c], heaviest[c], pdg.degree(c));
  };
  while (seq.size() < max_nodes) {
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < n; ++c) {
      if (!common[c]) continue;
      if (!best || key(c) > key(*best)) best = c;
    }
    if (!best) break;
    seq.push_back(*best);
    for (std::size_t c = 0; c < n; ++c) {
      common[c] = common[c] && pdg.has_edge(*best, c);
      heaviest[c] = std::max(heaviest[c], pdg.weight(*best, c));
      lightest[c] = std::min(lightest[c], pdg.weight(*best, c));
    }
  }
  return seq;
}

struct DekpsResult {
  std::vector<PartitionId> selected;  ///< partitions visited, in order
  std::vector<Match> matches;
  bool exhausted = false;             ///< common-neighbor set emptied before k matches
};

/// Densest-style k-partition selection with matching. `matcher(p)` returns
/// the matches found in partition p (usually at most one). Matching runs in
/// parallel batches over the precomputed visiting order; results are merged
/// in that order and cut at the first prefix holding k matches, so the
/// output does not depend on the thread count.
inline DekpsResult dekps_select(const PDG &pdg, std::size_t k,
                                const std::function<std::vector<Match>(PartitionId)> &matcher,
                                std::size_t threads = 1,
                                DekpsPick pick = DekpsPick::lightest_edge) {
  DekpsResult r;
  if (k == 0) return r;
  auto seq = dekps_sequence(pdg, pdg.size(), pick);
  const auto batch = std::max<std::size_t>(1, threads);
  for (std::size_t start = 0; start < seq.size() && r.matches.size() < k; start += batch) {
    const auto end = std::min(seq.size(), start + batch);
    std::vector<std::vector<Match>> found(end - start);
    parallel_for(end - start, threads, [&](std::size_t i) {
      found[i] = matcher(pdg.partition(seq[start + i]));
    });
    for (std::size_t i = 0; i < found.size() && r.matches.size() < k; ++i) {
      r.selected.push_back(pdg.partition(seq[start + i]));
      for (auto &m : found[i])
        if (r.matches.size() < k) r.matches.push_back(std::move(m));
    }
  }
  r.exhausted = r.matches.size() < k;
  return r;
}

}  // namespace divmatch
