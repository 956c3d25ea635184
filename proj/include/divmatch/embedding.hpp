//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "divmatch/features.hpp"
#include "divmatch/graph.hpp"
#include "divmatch/match.hpp"
#include "divmatch/partition.hpp"

namespace divmatch {

class DegenerateData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Form of the hinge on non-containing pairs. `per_dimension` charges every
/// coordinate where the host is not at least `margin` below the query;
/// `aggregate` charges the pair once, by how far the summed order violation
/// falls short of `margin`.
enum class NegativeLoss { per_dimension, aggregate };

inline const char *to_string(NegativeLoss l) {
  return l == NegativeLoss::per_dimension ? "per_dimension" : "aggregate";
}

inline NegativeLoss parse_negative_loss(const std::string &s) {
  if (s == "per_dimension") return NegativeLoss::per_dimension;
  if (s == "aggregate") return NegativeLoss::aggregate;
  throw std::invalid_argument("unknown negative loss '" + s + "'");
}

struct EmbeddingConfig {
  std::size_t embed_dim = 32;
  double margin = 1.0;
  double lambda_pos = 1.0;
  double lambda_neg = 1.0;
  NegativeLoss negative_loss = NegativeLoss::aggregate;
  std::size_t epochs = 150;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
};

struct TrainingPair {
  FeatureVector query;
  FeatureVector host;
  bool contains = false;
  PartitionId partition = 0;
  std::size_t query_vertices = 0;
};

/// Model input: log1p of each raw feature. Monotone, so it keeps the
/// componentwise order of raw features.
inline std::vector<double> model_input(std::span<const double> f) {
  std::vector<double> x(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) x[i] = std::log1p(f[i]);
  return x;
}

/// Σ_i max(0, E_q[i] − E_g[i]) for a containing pair.
inline double positive_loss(std::span<const double> eq, std::span<const double> eg) {
  double s = 0;
  for (std::size_t i = 0; i < eq.size(); ++i) s += std::max(0.0, eq[i] - eg[i]);
  return s;
}

/// Σ_i max(0, margin + E_g[i] − E_q[i]) for a non-containing pair.
inline double negative_loss(std::span<const double> eq, std::span<const double> eg,
                            double margin) {
  double s = 0;
  for (std::size_t i = 0; i < eq.size(); ++i) s += std::max(0.0, margin + eg[i] - eq[i]);
  return s;
}

/// max(0, margin − Σ_i max(0, E_q[i] − E_g[i])) for a non-containing pair.
inline double aggregate_negative_loss(std::span<const double> eq, std::span<const double> eg,
                                      double margin) {
  double violation = 0;
  for (std::size_t i = 0; i < eq.size(); ++i) violation += std::max(0.0, eq[i] - eg[i]);
  return std::max(0.0, margin - violation);
}

/// True iff eq[i] ≤ ep[i] + tol for every i.
inline bool order_contains(std::span<const double> eq, std::span<const double> ep,
                           double tol = 0.0) {
  for (std::size_t i = 0; i < eq.size(); ++i)
    if (eq[i] > ep[i] + tol) return false;
  return true;
}

/// Linear map followed by max(0, ·): E = relu(Wᵀ x), with x the model input
/// of a feature vector. W is feature_dim × embed_dim, row-major, and training
/// keeps it nonnegative.
class OrderEmbeddingModel {
 public:
  static constexpr int kFormatVersion = 1;

  OrderEmbeddingModel() = default;
  OrderEmbeddingModel(LabelDictionary dict, std::size_t embed_dim, double margin,
                      double lambda_pos, double lambda_neg,
                      NegativeLoss negative = NegativeLoss::aggregate)
      : dict_(std::move(dict)),
        feature_dim_(divmatch::feature_dim(dict_)),
        embed_dim_(embed_dim),
        margin_(margin),
        lambda_pos_(lambda_pos),
        lambda_neg_(lambda_neg),
        negative_(negative),
        weights_(feature_dim_ * embed_dim, 0.0) {}

  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t embed_dim() const { return embed_dim_; }
  double margin() const { return margin_; }
  double lambda_pos() const { return lambda_pos_; }
  double lambda_neg() const { return lambda_neg_; }
  NegativeLoss negative_loss() const { return negative_; }

  /// Loss of one pair given its two embeddings, weighted by λ.
  double pair_loss(std::span<const double> eq, std::span<const double> eg, bool contains) const {
    if (contains) return lambda_pos_ * positive_loss(eq, eg);
    return lambda_neg_ * (negative_ == NegativeLoss::per_dimension
                              ? divmatch::negative_loss(eq, eg, margin_)
                              : aggregate_negative_loss(eq, eg, margin_));
  }
  const LabelDictionary &dictionary() const { return dict_; }
  std::vector<double> &weights() { return weights_; }
  const std::vector<double> &weights() const { return weights_; }
  double weight(std::size_t f, std::size_t j) const { return weights_[f * embed_dim_ + j]; }

  std::vector<double> pre_activation(std::span<const double> x) const {
    std::vector<double> e(embed_dim_, 0.0);
    for (std::size_t f = 0; f < feature_dim_; ++f) {
      if (x[f] == 0.0) continue;
      const double *row = weights_.data() + f * embed_dim_;
      for (std::size_t j = 0; j < embed_dim_; ++j) e[j] += row[j] * x[f];
    }
    return e;
  }

  /// Embedding of a raw feature vector.
  std::vector<double> embed(std::span<const double> features) const {
    check_dim(features.size());
    auto e = pre_activation(model_input(features));
    for (auto &v : e) v = std::max(0.0, v);
    return e;
  }

  bool predict_contains(std::span<const double> query_features,
                        std::span<const double> host_features, double tol = 0.0) const {
    return order_contains(embed(query_features), embed(host_features), tol);
  }

  /// min_i (E_host[i] − E_query[i]); nonnegative exactly when the prediction
  /// is positive at tolerance 0.
  double slack(std::span<const double> query_features,
               std::span<const double> host_features) const {
    auto eq = embed(query_features), ep = embed(host_features);
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eq.size(); ++i) s = std::min(s, ep[i] - eq[i]);
    return s;
  }

  void check_dim(std::size_t dim) const {
    if (dim != feature_dim_)
      throw ModelError("feature vector has " + std::to_string(dim) +
                       " entries, model expects " + std::to_string(feature_dim_));
  }

  void save(std::ostream &out) const {
    out << "divmatch-order-embedding " << kFormatVersion << '\n'
        << "feature_dim " << feature_dim_ << '\n'
        << "embed_dim " << embed_dim_ << '\n'
        << std::setprecision(17) << "margin " << margin_ << '\n'
        << "lambda_pos " << lambda_pos_ << '\n'
        << "lambda_neg " << lambda_neg_ << '\n'
        << "negative_loss " << to_string(negative_) << '\n'
        << "labels " << dict_.labels().size();
    for (auto l : dict_.labels()) out << ' ' << l;
    out << "\nweights\n";
    for (std::size_t f = 0; f < feature_dim_; ++f) {
      for (std::size_t j = 0; j < embed_dim_; ++j) out << (j ? " " : "") << weight(f, j);
      out << '\n';
    }
  }

  static OrderEmbeddingModel load(std::istream &in) {
    auto expect = [&](const std::string &key) {
      std::string k;
      if (!(in >> k) || k != key) throw ModelError("model file: expected '" + key + "'");
    };
    expect("divmatch-order-embedding");
    int version = 0;
    in >> version;
    if (version != kFormatVersion)
      throw ModelError("unsupported model format version " + std::to_string(version));
    std::size_t fdim = 0, edim = 0, nlabels = 0;
    double margin = 0, lp = 0, ln = 0;
    expect("feature_dim");
    in >> fdim;
    expect("embed_dim");
    in >> edim;
    expect("margin");
    in >> margin;
    expect("lambda_pos");
    in >> lp;
    expect("lambda_neg");
    in >> ln;
    expect("negative_loss");
    std::string neg;
    in >> neg;
    NegativeLoss negative;
    try {
      negative = parse_negative_loss(neg);
    } catch (const std::invalid_argument &e) {
      throw ModelError(std::string("model file: ") + e.what());
    }
    expect("labels");
    in >> nlabels;
    std::vector<Label> labels(nlabels);
    for (auto &l : labels) in >> l;
    expect("weights");
    OrderEmbeddingModel m(LabelDictionary(std::move(labels)), edim, margin, lp, ln, negative);
    if (m.feature_dim_ != fdim)
      throw ModelError("model header declares " + std::to_string(fdim) +
                       " features, label dictionary implies " + std::to_string(m.feature_dim_));
    for (auto &w : m.weights_)
      if (!(in >> w)) throw ModelError("model file: truncated weight matrix");
    return m;
  }

  void save(const std::string &path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    save(out);
  }
  static OrderEmbeddingModel load(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot open model file '" + path + "'");
    return load(in);
  }

 private:
  LabelDictionary dict_;
  std::size_t feature_dim_ = 0;
  std::size_t embed_dim_ = 0;
  double margin_ = 1.0;
  double lambda_pos_ = 1.0;
  double lambda_neg_ = 1.0;
  NegativeLoss negative_ = NegativeLoss::aggregate;
  std::vector<double> weights_;
};

inline bool predict_contains(const OrderEmbeddingModel &model, std::span<const double> q,
                             std::span<const double> p, double tol = 0.0) {
  return model.predict_contains(q, p, tol);
}

struct TrainResult {
  OrderEmbeddingModel model;
  std::vector<double> loss_history;  ///< accepted loss after each epoch, first entry = initial
};

/// Mean over pairs of λ_pos·L_pos (containing) or λ_neg·L_neg (the rest).
inline double training_loss(const OrderEmbeddingModel &m, const std::vector<TrainingPair> &pairs) {
  double total = 0;
  for (const auto &p : pairs) {
    auto eq = m.embed(p.query), eg = m.embed(p.host);
    total += m.pair_loss(eq, eg, p.contains);
  }
  return pairs.empty() ? 0.0 : total / double(pairs.size());
}

/// Projected mini-batch gradient descent on the hinge losses. After each epoch the
/// full training loss is recomputed; an epoch that raises it is undone and
/// the step size halved, so the recorded loss never increases.
inline TrainResult train_order_embedding(const std::vector<TrainingPair> &pairs,
                                         const LabelDictionary &dict,
                                         const EmbeddingConfig &cfg = {}) {
  const bool any_pos = std::any_of(pairs.begin(), pairs.end(), [](auto &p) { return p.contains; });
  const bool any_neg = std::any_of(pairs.begin(), pairs.end(), [](auto &p) { return !p.contains; });
  if (!any_pos || !any_neg)
    throw DegenerateData("training needs both containing and non-containing pairs");

  TrainResult r{OrderEmbeddingModel(dict, cfg.embed_dim, cfg.margin, cfg.lambda_pos,
                                    cfg.lambda_neg, cfg.negative_loss),
                {}};
  auto &model = r.model;
  for (const auto &p : pairs) {
    model.check_dim(p.query.size());
    model.check_dim(p.host.size());
  }
  const auto F = model.feature_dim(), D = model.embed_dim();
  std::mt19937_64 rng(cfg.seed);
  // Start from the feature order itself: feature f feeds coordinate f mod D,
  // plus a little noise. Weights stay nonnegative throughout, so the map is
  // monotone and feature-dominated pairs are never predicted negative.
  std::uniform_real_distribution<double> noise(0.0, 0.01);
  for (auto &w : model.weights()) w = noise(rng);
  for (std::size_t f = 0; f < F; ++f) model.weights()[f * D + f % D] += 1.0;

  std::vector<std::vector<double>> xq(pairs.size()), xh(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    xq[i] = model_input(pairs[i].query);
    xh[i] = model_input(pairs[i].host);
  }

  double lr = cfg.learning_rate;
  double loss = training_loss(model, pairs);
  r.loss_history.push_back(loss);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(F * D);

  for (std::size_t epoch = 0; epoch < cfg.epochs && lr > 1e-9; ++epoch) {
    auto snapshot = model.weights();
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const auto end = std::min(order.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto i = order[b];
        auto pq = model.pre_activation(xq[i]), ph = model.pre_activation(xh[i]);
        double violation = 0;
        for (std::size_t j = 0; j < D; ++j)
          violation += std::max(0.0, std::max(0.0, pq[j]) - std::max(0.0, ph[j]));
        const bool aggregate_active = violation < cfg.margin;
        for (std::size_t j = 0; j < D; ++j) {
          const double eq = std::max(0.0, pq[j]), eh = std::max(0.0, ph[j]);
          // dL/dE_q[j]; dL/dE_h[j] is its negation
          double s = 0;
          if (pairs[i].contains) {
            if (eq > eh) s = cfg.lambda_pos;
          } else if (cfg.negative_loss == NegativeLoss::per_dimension) {
            if (cfg.margin + eh - eq > 0) s = -cfg.lambda_neg;
          } else if (aggregate_active && eq > eh) {
            s = -cfg.lambda_neg;
          }
          if (s == 0) continue;
          for (std::size_t f = 0; f < F; ++f) {
            double g = 0;
            if (pq[j] > 0) g += s * xq[i][f];
            if (ph[j] > 0) g -= s * xh[i][f];
            grad[f * D + j] += g;
          }
        }
      }
      const double scale = lr / double(end - start);
      auto &w = model.weights();
      for (std::size_t t = 0; t < w.size(); ++t) w[t] -= scale * grad[t];
      for (auto &x : w) x = std::max(0.0, x);
    }
    double next = training_loss(model, pairs);
    if (next > loss) {
      model.weights() = std::move(snapshot);
      lr /= 2;
    } else {
      loss = next;
    }
    r.loss_history.push_back(loss);
  }
  return r;
}

/// Fraction of pairs whose containment is predicted correctly.
inline double prediction_accuracy(const OrderEmbeddingModel &m,
                                  const std::vector<TrainingPair> &pairs, double tol = 0.0) {
  if (pairs.empty()) return 0.0;
  std::size_t right = 0;
  for (const auto &p : pairs) right += m.predict_contains(p.query, p.host, tol) == p.contains;
  return double(right) / double(pairs.size());
}

// ---------------------------------------------------------------------------
// Training data

struct SamplingConfig {
  std::size_t samples = 400;  ///< sampled query subgraphs; each yields two pairs
  std::size_t min_vertices = 3;
  std::size_t max_vertices = 8;
  std::uint64_t seed = 1;
};

/// Connected subgraph of `host` grown by a random walk from `start`, as the
/// subgraph induced on the visited vertices.
inline LabeledGraph random_walk_subgraph(const LabeledGraph &host, VertexId start,
                                         std::size_t size, std::mt19937_64 &rng) {
  std::vector<VertexId> visited{start};
  VertexId at = start;
  for (std::size_t step = 0; step < 8 * size && visited.size() < size; ++step) {
    auto nb = host.neighbors(at);
    if (nb.empty()) break;
    at = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)];
    if (std::find(visited.begin(), visited.end(), at) == visited.end()) visited.push_back(at);
  }
  return induced_subgraph(host, visited);
}

/// Label multiset of q fits inside that of host.
inline bool label_multiset_fits(const LabeledGraph &q, const LabeledGraph &host) {
  std::vector<std::uint32_t> need(std::max(q.label_bound(), host.label_bound()) + 1, 0);
  for (auto l : q.labels()) ++need[l];
  for (auto l : host.labels())
    if (l < need.size() && need[l] > 0) --need[l];
  return std::all_of(need.begin(), need.end(), [](auto c) { return c == 0; });
}

/// Query-sized subgraphs sampled by random walks inside partitions picked
/// with probability proportional to their size. Each sample gives a
/// containing pair with its own partition and a pair with another partition,
/// labeled by the label-multiset test or, when that passes, by the matcher.
/// Partition features are passed in so they are computed once per run.
inline std::vector<TrainingPair> sample_training_pairs(const PartitionSet &ps,
                                                       const std::vector<FeatureVector> &part_features,
                                                       const LabelDictionary &dict,
                                                       const SamplingConfig &cfg) {
  std::vector<TrainingPair> out;
  std::vector<double> weight;
  for (const auto &p : ps) weight.push_back(p.edges.empty() ? 0.0 : double(p.vertices.size()));
  if (std::accumulate(weight.begin(), weight.end(), 0.0) == 0.0) return out;
  std::mt19937_64 rng(cfg.seed);
  std::discrete_distribution<PartitionId> pick_partition(weight.begin(), weight.end());
  std::uniform_int_distribution<std::size_t> pick_size(cfg.min_vertices, cfg.max_vertices);

  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const auto pid = pick_partition(rng);
    const auto &p = ps[pid];
    std::vector<VertexId> starts;
    for (VertexId v = 0; v < p.local.vertex_count(); ++v)
      if (p.local.degree(v) > 0) starts.push_back(v);
    auto start = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
    QueryGraph q(random_walk_subgraph(p.local, start, pick_size(rng), rng));
    auto qf = extract_features(q, dict);
    out.push_back({qf, part_features[pid], true, pid, q.vertex_count()});

    if (ps.size() < 2) continue;
    PartitionId other = pid;
    for (int tries = 0; tries < 16 && other == pid; ++tries) other = pick_partition(rng);
    if (other == pid) continue;
    bool contains = label_multiset_fits(q, ps[other].local) &&
                    !intra_search(q, ps[other], 1).matches.empty();
    out.push_back({qf, part_features[other], contains, other, q.vertex_count()});
  }
  return out;
}

inline void write_training_csv(std::ostream &out, const std::vector<TrainingPair> &pairs,
                               const LabelDictionary &dict) {
  auto names = feature_names(dict);
  out << "partition,query_vertices,contains";
  for (const auto &n : names) out << ",q_" << n;
  for (const auto &n : names) out << ",p_" << n;
  out << '\n';
  for (const auto &p : pairs) {
    out << p.partition << ',' << p.query_vertices << ',' << (p.contains ? 1 : 0);
    for (auto v : p.query) out << ',' << v;
    for (auto v : p.host) out << ',' << v;
    out << '\n';
  }
}

}  // namespace divmatch
