//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: partition, train, query, bench, generate.
//

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "divmatch/divmatch.hpp"

namespace fs = std::filesystem;
using namespace divmatch;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInsufficient = 3;

// Thrown for bad arguments found after CLI11 has finished parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string data, query, model, output, cache_dir, pairs;
  std::string format = "json";
  std::string mode = "pdd";
  std::string partition_size = "1000:2000";
  std::string negative_loss = "aggregate";
  std::string kind = "simple";
  std::string dekps_pick = "lightest";
  std::string ks = "5,10";
  std::string modes = "pdd,pddplus";
  std::size_t k = 10;
  std::size_t threads = 1;
  std::uint64_t seed = 1;
  std::uint32_t hop_budget = 2;
  double tolerance = 0;
  std::size_t epochs = 150;
  std::size_t samples = 400;
  std::size_t count = 10;
  std::size_t max_vertices = kDefaultMaxQueryVertices;
  std::size_t queries_per_kind = 10;
  bool strict = false;
  bool no_timings = false;
  bool with_oracle = false;
  bool no_oracle = false;
};

RunConfig run_config(const Options &o) {
  RunConfig c;
  c.mode = parse_mode(o.mode);
  c.k = o.k;
  c.seed = o.seed;
  c.threads = o.threads;
  c.hop_budget = o.hop_budget;
  c.model_path = o.model;
  c.cache_dir = o.cache_dir;
  c.tolerance = o.tolerance;
  c.dekps_pick = parse_dekps_pick(o.dekps_pick);
  c.embedding.epochs = o.epochs;
  c.embedding.negative_loss = parse_negative_loss(o.negative_loss);
  c.sampling.samples = o.samples;
  try {
    c.partition_size = TargetSize::parse(o.partition_size);
  } catch (const std::exception &e) {
    throw ConfigError(std::string("--partition-size: ") + e.what());
  }
  c.validate();
  return c;
}

template <typename T>
std::vector<T> split_list(const std::string &text, T (*parse)(const std::string &)) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(parse(item));
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::size_t parse_count(const std::string &s) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || v == 0) throw UsageError("expected a positive integer, got '" + s + "'");
  return v;
}

// Writes to --output when given, stdout otherwise.
void emit(const Options &o, const std::function<void(std::ostream &)> &write) {
  if (o.output.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(o.output);
  if (!out) throw std::runtime_error("cannot write '" + o.output + "'");
  write(out);
}

void require_format(const Options &o) {
  if (o.format != "json" && o.format != "csv")
    throw UsageError("--format must be json or csv");
}

int cmd_partition(const Options &o) {
  require_format(o);
  auto cfg = run_config(o);
  auto g = load_graph(o.data);
  auto t = std::chrono::steady_clock::now();
  auto ps = partition_graph(g, cfg.partition_size, cfg.seed);
  auto pag = build_pag(ps);
  auto d = pag_distances(pag, cfg.threads);
  std::cerr << ps.size() << " partitions, replication ratio " << replication_ratio(ps)
            << ", PAG diameter " << d.diameter() << ", " << elapsed_ms(t) << " ms\n";
  emit(o, [&](std::ostream &out) {
    if (o.format == "csv")
      write_distance_csv(out, d);
    else
      out << partitions_to_json(ps, graph_hash(g), cfg.partition_size, cfg.seed).dump(2) << '\n';
  });
  return 0;
}

int cmd_train(const Options &o) {
  if (o.model.empty()) throw UsageError("train needs --model <path> for the output");
  auto cfg = run_config(o);
  auto pre = preprocess(load_graph(o.data), cfg);
  auto sampling = cfg.sampling;
  sampling.seed = cfg.seed;
  auto pairs = sample_training_pairs(pre.partitions, pre.partition_features, pre.dictionary, sampling);
  if (!o.pairs.empty()) {
    std::ofstream csv(o.pairs);
    if (!csv) throw std::runtime_error("cannot write '" + o.pairs + "'");
    write_training_csv(csv, pairs, pre.dictionary);
  }
  // Hold out every fifth pair to report accuracy on pairs the model has not seen.
  std::vector<TrainingPair> train, held;
  for (std::size_t i = 0; i < pairs.size(); ++i) (i % 5 == 4 ? held : train).push_back(pairs[i]);
  auto ecfg = cfg.embedding;
  ecfg.seed = cfg.seed;
  auto t = std::chrono::steady_clock::now();
  auto result = train_order_embedding(train, pre.dictionary, ecfg);
  const double ms = elapsed_ms(t);
  result.model.save(o.model);
  nlohmann::json j{{"schema_version", kReportSchemaVersion},
                   {"model", o.model},
                   {"pairs", pairs.size()},
                   {"train_pairs", train.size()},
                   {"held_out_pairs", held.size()},
                   {"initial_loss", result.loss_history.front()},
                   {"final_loss", result.loss_history.back()},
                   {"train_accuracy", prediction_accuracy(result.model, train, cfg.tolerance)},
                   {"held_out_accuracy", prediction_accuracy(result.model, held, cfg.tolerance)},
                   {"negative_loss", to_string(ecfg.negative_loss)}};
  if (!o.no_timings) j["training_ms"] = ms;
  emit(o, [&](std::ostream &out) { out << j.dump(2) << '\n'; });
  return 0;
}

int cmd_query(const Options &o) {
  require_format(o);
  auto cfg = run_config(o);
  auto pre = preprocess(load_graph(o.data), cfg);
  auto q = load_query(o.query);
  auto report = run(pre, q, cfg);
  report.times.partition_ms = pre.offline.partition_ms;
  report.times.distances_ms = pre.offline.distances_ms;
  report.times.features_ms = pre.offline.features_ms;
  report.times.regions_ms = pre.offline.regions_ms;
  report.times.training_ms = pre.offline.training_ms;
  if (cfg.mode != Mode::oracle) {
    if (o.with_oracle) {
      try {
        attach_oracle(report, run_oracle(pre.graph, q, cfg));
      } catch (const CapExceeded &e) {
        mark_oracle_unavailable(report, e.what());
      } catch (const BudgetExceeded &e) {
        mark_oracle_unavailable(report, e.what());
      }
    } else {
      mark_oracle_unavailable(report, "not run");
    }
  }
  emit(o, [&](std::ostream &out) {
    if (o.format == "csv") {
      std::string name = fs::path(o.data).filename().string();
      write_csv(out, {BenchmarkRow{name, 0, "", report, ""}});
    } else {
      out << to_json(report, !o.no_timings).dump(2) << '\n';
    }
  });
  if (o.strict && report.matches.size() < cfg.k) {
    std::cerr << "found " << report.matches.size() << " of " << cfg.k << " matches\n";
    return kExitInsufficient;
  }
  return 0;
}

int cmd_bench(const Options &o) {
  BenchmarkConfig bc;
  bc.base = run_config(o);
  bc.ks = split_list<std::size_t>(o.ks, parse_count);
  bc.modes = split_list<Mode>(o.modes, parse_mode);
  bc.with_oracle = !o.no_oracle;

  std::vector<SuiteGraph> suite;
  if (o.data.empty()) {
    suite = desk_suite(o.seed, o.queries_per_kind);
    if (o.partition_size == "1000:2000") bc.base.partition_size = desk_partition_size();
  } else {
    SuiteGraph sg{fs::path(o.data).filename().string(), load_graph(o.data), {}, {}};
    std::uint64_t s = o.seed;
    for (auto kind : {QueryKind::simple, QueryKind::common, QueryKind::complex}) {
      for (auto &q : generate_queries(sg.graph, kind, o.queries_per_kind, o.max_vertices, s++)) {
        sg.queries.push_back(std::move(q));
        sg.kinds.emplace_back(to_string(kind));
      }
    }
    suite.push_back(std::move(sg));
  }
  std::size_t done = 0;
  auto rows = run_benchmark(suite, bc, [&](const BenchmarkRow &row) {
    ++done;
    if (!row.error.empty())
      std::cerr << row.graph << " query " << row.query << " " << to_string(row.report.mode)
                << " k=" << row.report.k << ": " << row.error << '\n';
  });
  const std::string prefix = o.output.empty() ? "bench" : o.output;
  write_benchmark_files(prefix, rows);
  std::cerr << done << " rows written to " << prefix << ".csv and " << prefix << ".json\n";
  return 0;
}

int cmd_generate(const Options &o) {
  if (o.output.empty()) throw UsageError("generate needs --output <directory>");
  auto g = load_graph(o.data);
  auto qs = generate_queries(g, parse_query_kind(o.kind), o.count, o.max_vertices, o.seed);
  fs::create_directories(o.output);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto path = fs::path(o.output) / (o.kind + "-" + std::to_string(i) + ".graph");
    save_graph(path.string(), qs[i]);
  }
  std::cerr << qs.size() << " " << o.kind << " queries written to " << o.output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"divmatch: distance-diversified top-k subgraph matching"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--partition-size", o.partition_size, "target partition size min:max");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--output", o.output, "output path (stdout when omitted)");
  };
  auto model_opts = [&](CLI::App *sub) {
    sub->add_option("--model", o.model, "order-embedding model file");
    sub->add_option("--epochs", o.epochs, "training epochs");
    sub->add_option("--samples", o.samples, "sampled training subgraphs");
    sub->add_option("--negative-loss", o.negative_loss, "aggregate or per_dimension");
    sub->add_option("--tolerance", o.tolerance, "containment tolerance");
    sub->add_option("--dekps-pick", o.dekps_pick, "PDD+ partition pick rule: lightest or heaviest");
  };
  auto run_opts = [&](CLI::App *sub) {
    sub->add_option("--k", o.k, "number of results");
    sub->add_option("--hop-budget", o.hop_budget, "PAG hops for cross-partition matching");
    sub->add_option("--cache-dir", o.cache_dir, "partition cache directory");
  };

  auto *partition = app.add_subcommand("partition", "partition a graph and report the PAG");
  partition->add_option("--data", o.data, "data graph")->required();
  partition->add_option("--format", o.format, "json (partitions) or csv (PAG distances)");
  common(partition);

  auto *train = app.add_subcommand("train", "train a partition filter model");
  train->add_option("--data", o.data, "data graph")->required();
  train->add_option("--pairs", o.pairs, "also dump the training pairs as CSV");
  train->add_flag("--no-timings", o.no_timings, "omit timings from the report");
  common(train);
  model_opts(train);

  auto *query = app.add_subcommand("query", "run one top-k query");
  query->add_option("--data", o.data, "data graph")->required();
  query->add_option("--query", o.query, "query graph")->required();
  query->add_option("--mode", o.mode, "pdd, pddplus or oracle");
  query->add_option("--format", o.format, "json or csv");
  query->add_flag("--strict", o.strict, "exit with status 3 when fewer than k matches exist");
  query->add_flag("--no-timings", o.no_timings, "omit timings from the JSON report");
  query->add_flag("--with-oracle", o.with_oracle, "also run the oracle and report ND, NT and rho");
  common(query);
  model_opts(query);
  run_opts(query);

  auto *bench = app.add_subcommand("bench", "benchmark on the built-in suite or one graph");
  bench->add_option("--data", o.data, "data graph (built-in suite when omitted)");
  bench->add_option("--k", o.ks, "comma-separated k values");
  bench->add_option("--mode", o.modes, "comma-separated modes");
  bench->add_option("--queries-per-kind", o.queries_per_kind, "queries of each kind per graph");
  bench->add_option("--max-vertices", o.max_vertices, "largest generated query");
  bench->add_flag("--no-oracle", o.no_oracle, "skip oracle columns");
  common(bench);
  model_opts(bench);
  bench->add_option("--hop-budget", o.hop_budget, "PAG hops for cross-partition matching");

  auto *generate = app.add_subcommand("generate", "generate verified queries from a graph");
  generate->add_option("--data", o.data, "data graph")->required();
  generate->add_option("--kind", o.kind, "simple, common or complex");
  generate->add_option("--count", o.count, "number of queries");
  generate->add_option("--max-vertices", o.max_vertices, "largest query");
  generate->add_option("--seed", o.seed, "random seed");
  generate->add_option("--output", o.output, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*partition) return cmd_partition(o);
    if (*train) return cmd_train(o);
    if (*query) return cmd_query(o);
    if (*bench) return cmd_bench(o);
    if (*generate) return cmd_generate(o);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ModelError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
