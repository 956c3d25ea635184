//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "divmatch/graph.hpp"
#include "divmatch/match.hpp"
#include "divmatch/partition.hpp"

namespace divmatch {

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InsufficientMatches : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Minimum pairwise distance of a result set. nullopt stands for "unbounded"
/// (fewer than two matches); unreachable ranks above every finite value.
using SetDistance = std::optional<HopCount>;

/// Compares set distances with unbounded on top.
inline bool better(const SetDistance &a, const SetDistance &b) {
  if (!a) return b.has_value();
  if (!b) return false;
  return *a > *b;
}

inline std::string to_string(const SetDistance &d) {
  return d ? d->to_string() : std::string("unbounded");
}

struct ResultSet {
  std::vector<Match> matches;
  std::size_t k = 0;
};

struct DiversityScore {
  std::size_t coverage = 0;
  SetDistance min_pairwise_distance;
};

/// Hop distance between two vertex sets: BFS from all of a, stopping at the
/// first vertex of b.
inline HopCount subgraph_distance(const LabeledGraph &g, std::span<const VertexId> a,
                                  std::span<const VertexId> b) {
  std::vector<char> target(g.vertex_count(), 0), seen(g.vertex_count(), 0);
  for (auto v : b) target.at(v) = 1;
  std::vector<VertexId> frontier, next;
  for (auto v : a) {
    if (target.at(v)) return HopCount(0);
    if (!seen[v]) seen[v] = 1, frontier.push_back(v);
  }
  for (std::uint32_t level = 1; !frontier.empty(); ++level) {
    next.clear();
    for (auto u : frontier)
      for (auto w : g.neighbors(u)) {
        if (seen[w]) continue;
        if (target[w]) return HopCount(level);
        seen[w] = 1;
        next.push_back(w);
      }
    frontier.swap(next);
  }
  return HopCount::unreachable();
}

inline HopCount subgraph_distance(const LabeledGraph &g, const Match &a, const Match &b) {
  return subgraph_distance(g, a.vertex_set, b.vertex_set);
}

inline std::size_t coverage(std::span<const Match> matches) {
  std::vector<VertexId> all;
  for (const auto &m : matches) all.insert(all.end(), m.vertex_set.begin(), m.vertex_set.end());
  std::sort(all.begin(), all.end());
  return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
}

inline std::size_t coverage(const ResultSet &rs) { return coverage(rs.matches); }

/// Distances from one match to every match in a list: one multi-source BFS,
/// then a minimum over each target's vertices.
inline std::vector<HopCount> match_distance_row(const LabeledGraph &g,
                                                std::span<const Match> matches,
                                                std::size_t source) {
  auto dist = multi_source_bfs(g, matches[source].vertex_set);
  std::vector<HopCount> row(matches.size());
  for (std::size_t j = 0; j < matches.size(); ++j)
    for (auto v : matches[j].vertex_set) row[j] = std::min(row[j], dist[v]);
  return row;
}

inline SetDistance distance_diversity(const LabeledGraph &g, std::span<const Match> matches) {
  SetDistance best;
  for (std::size_t i = 0; i + 1 < matches.size(); ++i) {
    auto row = match_distance_row(g, matches, i);
    for (std::size_t j = i + 1; j < matches.size(); ++j)
      if (!best || row[j] < *best) best = row[j];
  }
  return best;
}

inline SetDistance distance_diversity(const LabeledGraph &g, const ResultSet &rs) {
  return distance_diversity(g, rs.matches);
}

inline DiversityScore score(const LabeledGraph &g, std::span<const Match> matches) {
  return {coverage(matches), distance_diversity(g, matches)};
}

// ---------------------------------------------------------------------------
// Oracles

struct OracleLimits {
  std::size_t cap = kUnlimited;            ///< distinct vertex sets
  std::uint64_t max_steps = 50'000'000;    ///< partial mappings tried
};

/// Exhaustive backtracking over the whole graph, no partitioning and no
/// pruning beyond label, degree and adjacency to already mapped neighbors.
/// One match per distinct vertex set, in order of first discovery. Throws
/// CapExceeded when either limit is hit.
inline std::vector<Match> oracle_enumerate(const LabeledGraph &g, const LabeledGraph &q,
                                           OracleLimits limits = {},
                                           std::size_t stop_after = kUnlimited) {
  std::vector<Match> out;
  const auto n = q.vertex_count();
  if (n == 0 || stop_after == 0) return out;
  // BFS order of the query so every later vertex has a mapped neighbor.
  std::vector<QueryVertex> order{0};
  std::vector<QueryVertex> anchor(n, 0);
  std::vector<char> placed(n, 0);
  placed[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (auto w : q.neighbors(order[i]))
      if (!placed[w]) placed[w] = 1, anchor[w] = order[i], order.push_back(w);
  for (QueryVertex u = 0; u < n; ++u)
    if (!placed[u]) order.push_back(u), anchor[u] = u;

  std::vector<VertexId> f(n);
  std::vector<char> mapped(n, 0), used(g.vertex_count(), 0);
  std::set<std::vector<VertexId>> seen;
  std::uint64_t steps = 0;
  bool done = false;

  auto fits = [&](QueryVertex u, VertexId v) {
    if (used[v] || g.label(v) != q.label(u) || g.degree(v) < q.degree(u)) return false;
    for (auto w : q.neighbors(u))
      if (mapped[w] && !g.has_edge(v, f[w])) return false;
    return true;
  };

  std::function<void(std::size_t)> go = [&](std::size_t depth) {
    if (depth == n) {
      auto m = Match::from_mapping(f, kCrossPartition);
      if (seen.insert(m.vertex_set).second) {
        if (out.size() >= limits.cap) throw CapExceeded("oracle match cap exceeded");
        out.push_back(std::move(m));
        done = out.size() >= stop_after;
      }
      return;
    }
    auto u = order[depth];
    auto attempt = [&](VertexId v) {
      if (++steps > limits.max_steps) throw CapExceeded("oracle step budget exceeded");
      if (!fits(u, v)) return;
      f[u] = v;
      mapped[u] = used[v] = 1;
      go(depth + 1);
      mapped[u] = used[v] = 0;
    };
    if (depth > 0 && anchor[u] != u) {
      for (auto v : g.neighbors(f[anchor[u]])) {
        attempt(v);
        if (done) return;
      }
    } else {
      for (VertexId v = 0; v < g.vertex_count(); ++v) {
        attempt(v);
        if (done) return;
      }
    }
  };
  go(0);
  return out;
}

inline std::optional<Match> oracle_first_match(const LabeledGraph &g, const LabeledGraph &q,
                                               OracleLimits limits = {}) {
  auto ms = oracle_enumerate(g, q, limits, 1);
  if (ms.empty()) return std::nullopt;
  return ms.front();
}

enum class SelectMode { exact, greedy_backtrack };

struct Selection {
  ResultSet result;
  SetDistance distance;
};

inline constexpr double kDefaultExactBudget = 2e6;

/// Number of k-subsets of m items, saturating at a large value.
inline double subset_count(std::size_t m, std::size_t k) {
  if (k > m) return 0;
  double c = 1;
  for (std::size_t i = 0; i < k; ++i) {
    c = c * double(m - i) / double(i + 1);
    if (c > 1e18) return 1e18;
  }
  return c;
}

namespace detail {

/// Lazily computed match-to-match distance rows.
class MatchDistances {
 public:
  MatchDistances(const LabeledGraph &g, std::span<const Match> ms) : g_(g), ms_(ms), rows_(ms.size()) {}

  const std::vector<HopCount> &row(std::size_t i) {
    if (!rows_[i]) rows_[i] = match_distance_row(g_, ms_, i);
    return *rows_[i];
  }
  HopCount at(std::size_t i, std::size_t j) { return row(i)[j]; }
  std::size_t size() const { return ms_.size(); }

 private:
  const LabeledGraph &g_;
  std::span<const Match> ms_;
  std::vector<std::optional<std::vector<HopCount>>> rows_;
};

}  // namespace detail

/// Max-min top-k selection over an explicit match list.
///
/// Exact mode returns a k-subset with the largest minimum pairwise distance
/// (deterministic for a given match list); it throws BudgetExceeded when the
/// search grows past `budget` nodes. Greedy-backtrack mode starts from
/// the farthest pair, repeatedly adds the match farthest from the chosen set,
/// and when an addition lowers the set's distance retries the previous pick
/// with the runner-up candidates, keeping the better of the two lines.
inline Selection oracle_select_topk(const LabeledGraph &g, std::vector<Match> matches,
                                    std::size_t k, SelectMode mode,
                                    double budget = kDefaultExactBudget) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (matches.size() < k)
    throw InsufficientMatches("need " + std::to_string(k) + " matches, have " +
                              std::to_string(matches.size()));
  std::sort(matches.begin(), matches.end(),
            [](const Match &a, const Match &b) { return a.vertex_set < b.vertex_set; });
  const auto m = matches.size();
  Selection sel;
  sel.result.k = k;
  auto finish = [&](const std::vector<std::size_t> &picked) {
    for (auto i : picked) sel.result.matches.push_back(matches[i]);
    sel.distance = distance_diversity(g, sel.result.matches);
    return sel;
  };
  if (k == 1) return finish({0});

  detail::MatchDistances d(g, matches);

  if (mode == SelectMode::exact) {
    // The optimum is the largest t such that some k matches are pairwise at
    // least t apart, i.e. the graph joining matches at distance ≥ t has a
    // k-clique. Binary search over the distinct distances; each probe is a
    // bitset clique search that branches in colour order and prunes with
    // the greedy colouring bound. `budget` caps the search nodes.
    // Matches with identical distance rows are at distance 0 from each
    // other and interchangeable otherwise, so one of each suffices.
    std::vector<std::size_t> reps;
    {
      std::map<std::vector<HopCount>, std::size_t> seen;
      for (std::size_t i = 0; i < m; ++i)
        if (seen.try_emplace(d.row(i), i).second) reps.push_back(i);
    }
    if (reps.size() < k) {
      std::vector<std::size_t> first(k);
      std::iota(first.begin(), first.end(), 0);
      return finish(first);
    }
    const auto m = reps.size();
    std::vector<std::vector<HopCount>> dist(m, std::vector<HopCount>(m));
    std::vector<HopCount> values;
    for (std::size_t i = 0; i < m; ++i) {
      const auto &row = d.row(reps[i]);
      for (std::size_t j = 0; j < m; ++j) dist[i][j] = row[reps[j]];
      for (std::size_t j = i + 1; j < m; ++j) values.push_back(dist[i][j]);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    const std::size_t words = (m + 63) / 64;
    using Bits = std::vector<std::uint64_t>;
    auto any = [](const Bits &b) {
      return std::any_of(b.begin(), b.end(), [](std::uint64_t w) { return w != 0; });
    };
    double nodes = 0;
    auto clique_at = [&](HopCount t) -> std::optional<std::vector<std::size_t>> {
      // Renumber by descending degree so colouring sees hubs first.
      std::vector<std::size_t> degree(m, 0), order(m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) degree[i] += i != j && dist[i][j] >= t;
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](auto a, auto b) { return degree[a] > degree[b]; });
      std::vector<Bits> adj(m, Bits(words, 0));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          if (i != j && dist[order[i]][order[j]] >= t) adj[i][j / 64] |= 1ULL << (j % 64);

      std::vector<std::size_t> cur, found;
      std::function<bool(Bits)> grow = [&](Bits cand) {
        if (++nodes > budget) throw BudgetExceeded("exact selection exceeded its search budget");
        // Greedy colouring in index order: each class is an independent set.
        std::vector<std::pair<std::size_t, std::size_t>> coloured;  // vertex, colour
        Bits left = cand;
        for (std::size_t colour = 1; any(left); ++colour) {
          Bits open = left;
          for (std::size_t w = 0; w < words; ++w) {
            while (open[w]) {
              const auto v = w * 64 + std::size_t(std::countr_zero(open[w]));
              left[w] &= ~(1ULL << (v % 64));
              for (std::size_t x = w; x < words; ++x) open[x] &= ~adj[v][x];
              open[w] &= ~(1ULL << (v % 64));
              coloured.push_back({v, colour});
            }
          }
        }
        for (auto it = coloured.rbegin(); it != coloured.rend(); ++it) {
          if (cur.size() + it->second < k) return false;
          const auto v = it->first;
          cur.push_back(v);
          if (cur.size() == k) return found = cur, true;
          Bits next(words);
          for (std::size_t w = 0; w < words; ++w) next[w] = cand[w] & adj[v][w];
          if (any(next) && grow(std::move(next))) return true;
          cur.pop_back();
          cand[v / 64] &= ~(1ULL << (v % 64));
        }
        return false;
      };
      Bits all(words, 0);
      for (std::size_t i = 0; i < m; ++i) all[i / 64] |= 1ULL << (i % 64);
      if (!grow(all)) return std::nullopt;
      std::vector<std::size_t> out;
      for (auto v : found) out.push_back(reps[order[v]]);
      std::sort(out.begin(), out.end());
      return out;
    };

    std::size_t lo = 0, hi = values.size() - 1;  // values[lo] is always feasible
    std::optional<std::vector<std::size_t>> best;
    while (lo < hi) {
      auto mid = (lo + hi + 1) / 2;
      if (auto c = clique_at(values[mid])) lo = mid, best = std::move(c);
      else hi = mid - 1;
    }
    if (!best) best = clique_at(values[lo]);
    return finish(*best);
  }

  // Greedy with one level of backtracking.
  std::size_t a = 0, b = 1;
  HopCount far = d.at(0, 1);
  for (std::size_t i = 0; i < m; ++i) {
    const auto &row = d.row(i);
    for (std::size_t j = i + 1; j < m; ++j)
      if (row[j] > far) far = row[j], a = i, b = j;
  }

  // min distance from each match to the chosen set
  auto extend = [&](std::vector<std::size_t> picked, std::vector<HopCount> to_set,
                    HopCount value) {
    std::vector<char> in(m, 0);
    for (auto p : picked) in[p] = 1;
    while (picked.size() < k) {
      std::size_t pick = m;
      for (std::size_t i = 0; i < m; ++i)
        if (!in[i] && (pick == m || to_set[i] > to_set[pick])) pick = i;
      value = std::min(value, to_set[pick]);
      picked.push_back(pick);
      in[pick] = 1;
      const auto &row = d.row(pick);
      for (std::size_t i = 0; i < m; ++i) to_set[i] = std::min(to_set[i], row[i]);
    }
    return std::pair{value, picked};
  };

  std::vector<std::size_t> picked{a, b};
  std::vector<HopCount> to_set(m);
  for (std::size_t i = 0; i < m; ++i) to_set[i] = std::min(d.at(a, i), d.at(b, i));
  HopCount value = far;
  std::vector<char> in(m, 0);
  in[a] = in[b] = 1;
  constexpr std::size_t kAlternatives = 8;

  while (picked.size() < k) {
    std::vector<std::size_t> ranked;
    for (std::size_t i = 0; i < m; ++i)
      if (!in[i]) ranked.push_back(i);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](auto x, auto y) { return to_set[x] > to_set[y]; });
    auto pick = ranked.front();
    auto next_value = std::min(value, to_set[pick]);
    if (next_value < value && picked.size() + 1 < k && ranked.size() > 1) {
      // The greedy line drops here; compare completions from the top
      // alternatives for this slot and commit to the best one.
      auto best_line = extend(picked, to_set, value);
      for (std::size_t r = 0; r < std::min(kAlternatives, ranked.size()); ++r) {
        auto alt = picked;
        auto alt_to = to_set;
        auto c = ranked[r];
        alt.push_back(c);
        const auto &row = d.row(c);
        for (std::size_t i = 0; i < m; ++i) alt_to[i] = std::min(alt_to[i], row[i]);
        auto line = extend(alt, alt_to, std::min(value, to_set[c]));
        if (line.first > best_line.first) best_line = line;
      }
      return finish(best_line.second);
    }
    value = next_value;
    picked.push_back(pick);
    in[pick] = 1;
    const auto &row = d.row(pick);
    for (std::size_t i = 0; i < m; ++i) to_set[i] = std::min(to_set[i], row[i]);
  }
  return finish(picked);
}

struct ApproxStats {
  std::optional<HopCount> h;  ///< nullopt with fewer than two partitions
  SetDistance achieved;
  SetDistance optimal;
  double rho = 1.0;
};

/// Ratio of achieved to optimal set distance. Equal values (including two
/// zeros or two unbounded values) give 1; an unreachable optimum against a
/// finite achievement gives 0.
inline double approximation_ratio(const SetDistance &achieved, const SetDistance &optimal) {
  if (achieved == optimal) return 1.0;
  if (!optimal || !optimal->reachable()) return 0.0;
  if (!achieved) return 1.0;
  if (!achieved->reachable()) return 1.0;
  if (optimal->value() == 0) return 1.0;
  return double(achieved->value()) / double(optimal->value());
}

inline ApproxStats approx_stats(std::span<const PartitionId> selected, const DistanceMatrix &D,
                                const SetDistance &achieved, const SetDistance &optimal) {
  ApproxStats s;
  for (std::size_t i = 0; i < selected.size(); ++i)
    for (std::size_t j = i + 1; j < selected.size(); ++j) {
      auto h = D.at(selected[i], selected[j]);
      if (!s.h || h < *s.h) s.h = h;
    }
  s.achieved = achieved;
  s.optimal = optimal;
  s.rho = approximation_ratio(achieved, optimal);
  return s;
}

}  // namespace divmatch
