//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "divmatch/graph_io.hpp"
#include "divmatch/partition.hpp"

namespace divmatch {

inline constexpr int kPartitionSchemaVersion = 1;

inline nlohmann::json partitions_to_json(const PartitionSet &ps,
                                         const std::string &graph_hash,
                                         TargetSize target, std::uint64_t seed) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto &p : ps) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto &e : p.edges) edges.push_back({e.u, e.v});
    parts.push_back({{"id", p.id},
                     {"vertices", p.vertices},
                     {"edges", std::move(edges)},
                     {"replicated", p.replicated}});
  }
  return {{"schema_version", kPartitionSchemaVersion},
          {"graph_hash", graph_hash},
          {"target_size", {target.min, target.max}},
          {"seed", seed},
          {"vertex_count", ps.data_vertex_count()},
          {"partitions", std::move(parts)}};
}

/// Rebuilds a PartitionSet from its JSON dump; the dump must describe `g`.
inline PartitionSet partitions_from_json(const LabeledGraph &g,
                                         const nlohmann::json &doc) {
  if (doc.at("schema_version").get<int>() != kPartitionSchemaVersion)
    throw ValidationError("unsupported partition schema version");
  if (doc.at("vertex_count").get<std::size_t>() != g.vertex_count())
    throw ValidationError("partition dump does not match the data graph");
  std::vector<std::vector<Edge>> groups;
  std::vector<std::vector<VertexId>> vertices;
  for (const auto &p : doc.at("partitions")) {
    auto &edges = groups.emplace_back();
    for (const auto &e : p.at("edges")) edges.push_back({e.at(0), e.at(1)});
    vertices.push_back(p.at("vertices").get<std::vector<VertexId>>());
  }
  return PartitionSet::from_groups(g, std::move(groups), std::move(vertices));
}

inline void write_distance_csv(std::ostream &out, const DistanceMatrix &d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j) out << ',';
      auto h = d.at(i, j);
      if (h.reachable())
        out << h.value();
      else
        out << "inf";
    }
    out << '\n';
  }
}

inline DistanceMatrix read_distance_csv(std::istream &in) {
  std::vector<std::vector<long>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto &row = rows.emplace_back();
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ','))
      row.push_back(cell == "inf" ? -1 : std::stol(cell));
  }
  return DistanceMatrix::from_rows(rows);
}

/// Directory of partition dumps keyed by (graph hash, target size, seed).
class PartitionCache {
 public:
  explicit PartitionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path stem(const std::string &hash, TargetSize t,
                             std::uint64_t seed) const {
    return dir_ / ("partitions-" + hash + "-" + std::to_string(t.min) + "-" +
                   std::to_string(t.max) + "-" + std::to_string(seed));
  }

  std::optional<std::pair<PartitionSet, DistanceMatrix>> load(
      const LabeledGraph &g, const std::string &hash, TargetSize t,
      std::uint64_t seed) const {
    auto base = stem(hash, t, seed);
    std::ifstream js(base.string() + ".json"), csv(base.string() + ".dist.csv");
    if (!js || !csv) return std::nullopt;
    auto doc = nlohmann::json::parse(js);
    if (doc.at("graph_hash") != hash) return std::nullopt;
    return std::pair{partitions_from_json(g, doc), read_distance_csv(csv)};
  }

  void store(const PartitionSet &ps, const DistanceMatrix &d,
             const std::string &hash, TargetSize t, std::uint64_t seed) const {
    std::filesystem::create_directories(dir_);
    auto base = stem(hash, t, seed);
    std::ofstream js(base.string() + ".json");
    js << partitions_to_json(ps, hash, t, seed).dump() << '\n';
    std::ofstream csv(base.string() + ".dist.csv");
    write_distance_csv(csv, d);
    if (!js || !csv) throw std::runtime_error("cannot write partition cache in " + dir_.string());
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace divmatch
