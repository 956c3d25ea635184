//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "divmatch/generators.hpp"
#include "divmatch/pipeline.hpp"
#include "divmatch/queries.hpp"

namespace divmatch {

struct SuiteGraph {
  std::string name;
  LabeledGraph graph;
  std::vector<QueryGraph> queries;
  std::vector<std::string> kinds;  ///< one per query, free-form
};

struct BenchmarkConfig {
  RunConfig base;  ///< mode and k are overridden per row
  std::vector<std::size_t> ks{5, 10};
  std::vector<Mode> modes{Mode::pdd, Mode::pddplus};
  bool with_oracle = true;
};

struct BenchmarkRow {
  std::string graph;
  std::size_t query = 0;
  std::string kind;
  RunReport report;
  std::string error;  ///< nonempty when the row failed
};

/// Three geometric graphs of 1k–5k vertices with 30 queries each (ten of
/// every kind, at most 6 vertices). Only queries with at least
/// `min_matches` matches are kept, so every top-k instance up to that k has
/// a real choice to make.
inline std::vector<SuiteGraph> desk_suite(std::uint64_t seed = 7, std::size_t queries_per_kind = 10,
                                          std::size_t min_matches = 10) {
  struct Shape {
    const char *name;
    std::size_t n;
    double degree;
    Label labels;
  };
  const Shape shapes[] = {{"geo-1000", 1000, 6.0, 4},
                        {"geo-3112", 3112, 8.0, 6},
                        {"geo-5000", 5000, 5.2, 5}};
  std::vector<SuiteGraph> out;
  std::uint64_t s = seed;
  for (const auto &sp : shapes) {
    SuiteGraph sg{sp.name, gen::random_geometric(sp.n, sp.degree, sp.labels, s++), {}, {}};
    for (auto kind : {QueryKind::simple, QueryKind::common, QueryKind::complex}) {
      std::size_t kept = 0;
      for (std::size_t round = 0; kept < queries_per_kind; ++round) {
        if (round == 20)
          throw GenerationFailed(std::string("too few ") + to_string(kind) + " queries with " +
                                 std::to_string(min_matches) + " matches on " + sp.name);
        for (auto &q : generate_queries(sg.graph, kind, queries_per_kind, 6, s++)) {
          if (kept == queries_per_kind) break;
          if (oracle_enumerate(sg.graph, q, {}, min_matches).size() < min_matches) continue;
          sg.queries.push_back(std::move(q));
          sg.kinds.emplace_back(to_string(kind));
          ++kept;
        }
      }
    }
    out.push_back(std::move(sg));
  }
  return out;
}

/// Partition size used with the desk suite.
inline TargetSize desk_partition_size() { return {50, 100}; }

/// Runs every (graph, query, k, mode). The oracle runs once per (graph,
/// query, k) and its columns are attached to every row of that instance.
/// Failed rows keep their error text and the suite continues.
inline std::vector<BenchmarkRow> run_benchmark(
    const std::vector<SuiteGraph> &suite, const BenchmarkConfig &cfg,
    const std::function<void(const BenchmarkRow &)> &progress = {}) {
  std::vector<BenchmarkRow> rows;
  for (const auto &sg : suite) {
    auto base = cfg.base;
    base.validate();
    auto pre = preprocess(sg.graph, base);
    bool model_ready = false;
    for (std::size_t qi = 0; qi < sg.queries.size(); ++qi) {
      const auto &q = sg.queries[qi];
      const std::string kind = qi < sg.kinds.size() ? sg.kinds[qi] : "";
      for (auto k : cfg.ks) {
        auto rc = base;
        rc.k = k;
        std::optional<RunReport> oracle;
        std::string oracle_reason;
        const bool want_oracle =
            cfg.with_oracle ||
            std::find(cfg.modes.begin(), cfg.modes.end(), Mode::oracle) != cfg.modes.end();
        if (want_oracle) {
          try {
            oracle = run_oracle(sg.graph, q, rc);
          } catch (const CapExceeded &e) {
            oracle_reason = e.what();
          } catch (const BudgetExceeded &e) {
            oracle_reason = e.what();
          }
        }
        for (auto mode : cfg.modes) {
          BenchmarkRow row{sg.name, qi, kind, {}, {}};
          rc.mode = mode;
          try {
            if (mode == Mode::oracle) {
              if (!oracle) throw std::runtime_error("oracle unavailable: " + oracle_reason);
              row.report = *oracle;
            } else {
              if (mode == Mode::pddplus && !model_ready) {
                prepare_model(pre, rc);
                model_ready = true;
              }
              row.report = mode == Mode::pdd ? run_pdd(pre, q, rc) : run_pddplus(pre, q, rc);
              if (oracle) attach_oracle(row.report, *oracle);
              else mark_oracle_unavailable(row.report, want_oracle ? oracle_reason : "not run");
            }
            row.report.times.partition_ms = pre.offline.partition_ms;
            row.report.times.distances_ms = pre.offline.distances_ms;
            row.report.times.features_ms = pre.offline.features_ms;
            row.report.times.regions_ms = pre.offline.regions_ms;
            row.report.times.training_ms = pre.offline.training_ms;
          } catch (const std::exception &e) {
            row.error = e.what();
            row.report.mode = mode;
            row.report.k = k;
          }
          if (progress) progress(row);
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

namespace detail {

inline std::string csv_number(const std::optional<double> &v) {
  if (!v) return "";
  std::ostringstream s;
  s.precision(6);
  s << *v;
  return s.str();
}

inline std::string csv_distance(const SetDistance &d) {
  if (!d) return "";
  if (!d->reachable()) return "inf";
  return std::to_string(d->value());
}

inline std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_csv(std::ostream &out, const std::vector<BenchmarkRow> &rows) {
  out << "graph,query,kind,mode,k,matches,f_cov,normalized_coverage,f_dis,nd,nt,rho,h,"
         "oracle_f_dis,oracle_ms,partition_ms,distances_ms,features_ms,regions_ms,training_ms,"
         "selection_ms,matching_ms,online_ms,rungs,status,error\n";
  for (const auto &row : rows) {
    const auto &r = row.report;
    std::string rungs;
    for (const auto &s : r.rungs) rungs += (rungs.empty() ? "" : ";") + s;
    auto num = [](double v) { return detail::csv_number(v); };
    out << detail::csv_field(row.graph) << ',' << row.query << ',' << row.kind << ','
        << to_string(r.mode) << ',' << r.k << ',' << r.matches.size() << ',' << r.coverage << ','
        << num(r.normalized_coverage) << ',' << detail::csv_distance(r.distance) << ','
        << detail::csv_number(r.nd) << ',' << detail::csv_number(r.nt) << ','
        << detail::csv_number(r.rho) << ','
        << (r.h ? detail::csv_distance(*r.h) : std::string()) << ','
        << (r.oracle.available ? detail::csv_distance(r.oracle.distance) : std::string()) << ','
        << (r.oracle.available ? num(r.oracle.time_ms) : std::string()) << ','
        << num(r.times.partition_ms) << ',' << num(r.times.distances_ms) << ','
        << num(r.times.features_ms) << ',' << num(r.times.regions_ms) << ','
        << num(r.times.training_ms) << ','
        << num(r.times.selection_ms) << ',' << num(r.times.matching_ms) << ','
        << num(r.times.online_ms) << ',' << rungs << ','
        << (!row.error.empty() ? "error" : r.complete ? "complete" : "exhausted") << ','
        << detail::csv_field(row.error) << '\n';
  }
}

/// Linear-interpolation quantile of a nonempty sample.
inline double quantile(std::vector<double> xs, double p) {
  std::sort(xs.begin(), xs.end());
  const double at = p * double(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(at));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (xs[hi] - xs[lo]) * (at - double(lo));
}

inline nlohmann::json quantile_summary(const std::vector<double> &xs) {
  if (xs.empty()) return {{"count", 0}};
  double sum = 0;
  for (double x : xs) sum += x;
  return {{"count", xs.size()},
          {"mean", sum / double(xs.size())},
          {"min", quantile(xs, 0.0)},
          {"p10", quantile(xs, 0.1)},
          {"p25", quantile(xs, 0.25)},
          {"median", quantile(xs, 0.5)},
          {"p75", quantile(xs, 0.75)},
          {"p90", quantile(xs, 0.9)},
          {"max", quantile(xs, 1.0)}};
}

/// Per (mode, k) quantiles of ND, NT, ρ, normalized coverage and online time.
inline nlohmann::json summary_json(const std::vector<BenchmarkRow> &rows) {
  struct Acc {
    std::vector<double> nd, nt, rho, coverage, online;
    std::size_t rows = 0, errors = 0, exhausted = 0, nd_at_08 = 0;
  };
  std::map<std::pair<std::string, std::size_t>, Acc> groups;
  for (const auto &row : rows) {
    auto &a = groups[{to_string(row.report.mode), row.report.k}];
    ++a.rows;
    if (!row.error.empty()) {
      ++a.errors;
      continue;
    }
    const auto &r = row.report;
    if (!r.complete) ++a.exhausted;
    if (r.nd) a.nd.push_back(*r.nd), a.nd_at_08 += *r.nd >= 0.8;
    if (r.nt) a.nt.push_back(*r.nt);
    if (r.rho) a.rho.push_back(*r.rho);
    a.coverage.push_back(r.normalized_coverage);
    a.online.push_back(r.times.online_ms);
  }
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto &[key, a] : groups) {
    groups_json.push_back(
        {{"mode", key.first},
         {"k", key.second},
         {"rows", a.rows},
         {"errors", a.errors},
         {"exhausted", a.exhausted},
         {"nd", quantile_summary(a.nd)},
         {"nd_at_least_0_8",
          a.nd.empty() ? nlohmann::json(nullptr) : nlohmann::json(double(a.nd_at_08) / double(a.nd.size()))},
         {"nt", quantile_summary(a.nt)},
         {"rho", quantile_summary(a.rho)},
         {"normalized_coverage", quantile_summary(a.coverage)},
         {"online_ms", quantile_summary(a.online)}});
  }
  return {{"schema_version", kReportSchemaVersion}, {"rows", rows.size()}, {"groups", groups_json}};
}

/// Writes <prefix>.csv and <prefix>.json.
inline void write_benchmark_files(const std::string &prefix, const std::vector<BenchmarkRow> &rows) {
  std::ofstream csv(prefix + ".csv");
  if (!csv) throw std::runtime_error("cannot write " + prefix + ".csv");
  write_csv(csv, rows);
  std::ofstream js(prefix + ".json");
  if (!js) throw std::runtime_error("cannot write " + prefix + ".json");
  js << summary_json(rows).dump(2) << '\n';
}

}  // namespace divmatch
