//
// divmatch - distance-diversified top-k subgraph matching
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "divmatch/graph.hpp"

namespace divmatch {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::uint64_t parse_uint(std::string_view tok, std::size_t line_no) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" +
                     std::string(tok) + "'");
  return value;
}

}  // namespace detail

/// Reads the `t / v / e` text format. Vertex lines must appear in id order
/// with no gaps; edge lines may list each undirected edge once in either
/// orientation.
inline LabeledGraph read_graph(std::istream &in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> header;
  std::vector<Label> labels;
  std::vector<std::uint32_t> declared_degree;
  std::vector<Edge> edges;
  bool seen_edge = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto tok = detail::split_ws(line);
    if (tok.empty()) continue;
    auto num = [&](std::size_t i) { return detail::parse_uint(tok[i], line_no); };
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };

    if (tok[0] == "t") {
      if (header) throw ParseError(where() + "duplicate header");
      if (tok.size() != 3) throw ParseError(where() + "expected 't <|V|> <|E|>'");
      header = {num(1), num(2)};
      if (header->first >= std::numeric_limits<VertexId>::max())
        throw ParseError(where() + "vertex count too large");
      labels.reserve(header->first);
      declared_degree.reserve(header->first);
      edges.reserve(header->second);
    } else if (tok[0] == "v") {
      if (!header) throw ParseError(where() + "vertex before header");
      if (seen_edge) throw ParseError(where() + "vertex line after edge lines");
      if (tok.size() != 3 && tok.size() != 4)
        throw ParseError(where() + "expected 'v <id> <label> <degree>'");
      auto id = num(1);
      if (id >= header->first)
        throw ParseError(where() + "vertex id " + std::to_string(id) +
                         " out of range");
      if (id != labels.size())
        throw ValidationError(where() + "vertex ids must be dense and ordered, "
                              "expected " + std::to_string(labels.size()));
      auto label = num(2);
      if (label >= std::numeric_limits<Label>::max())
        throw ParseError(where() + "label out of range");
      labels.push_back(static_cast<Label>(label));
      declared_degree.push_back(
          tok.size() == 4 ? static_cast<std::uint32_t>(num(3))
                          : std::numeric_limits<std::uint32_t>::max());
    } else if (tok[0] == "e") {
      if (!header) throw ParseError(where() + "edge before header");
      if (tok.size() != 3) throw ParseError(where() + "expected 'e <u> <v>'");
      seen_edge = true;
      auto u = num(1), v = num(2);
      if (u >= header->first || v >= header->first)
        throw ParseError(where() + "edge endpoint out of range");
      edges.push_back({static_cast<VertexId>(u), static_cast<VertexId>(v)});
    } else {
      throw ParseError(where() + "unknown record '" + std::string(tok[0]) + "'");
    }
  }

  if (!header) throw ParseError("missing 't' header");
  if (labels.size() != header->first)
    throw ValidationError("declared " + std::to_string(header->first) +
                          " vertices, found " + std::to_string(labels.size()));
  if (edges.size() != header->second)
    throw ValidationError("declared " + std::to_string(header->second) +
                          " edges, found " + std::to_string(edges.size()));

  LabeledGraph g(std::move(labels), edges);
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    auto d = declared_degree[v];
    if (d != std::numeric_limits<std::uint32_t>::max() && d != g.degree(v))
      throw ValidationError("vertex " + std::to_string(v) + " declares degree " +
                            std::to_string(d) + " but has " +
                            std::to_string(g.degree(v)));
  }
  return g;
}

inline LabeledGraph read_graph(const std::string &text) {
  std::istringstream in(text);
  return read_graph(in);
}

inline void write_graph(std::ostream &out, const LabeledGraph &g) {
  out << "t " << g.vertex_count() << ' ' << g.edge_count() << '\n';
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    out << "v " << v << ' ' << g.label(v) << ' ' << g.degree(v) << '\n';
  for (const auto &e : g.edges()) out << "e " << e.u << ' ' << e.v << '\n';
}

inline std::string to_text(const LabeledGraph &g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

inline LabeledGraph load_graph(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file '" + path + "'");
  return read_graph(in);
}

inline QueryGraph load_query(const std::string &path,
                             std::size_t max_vertices = kDefaultMaxQueryVertices) {
  return QueryGraph(load_graph(path), max_vertices);
}

inline void save_graph(const std::string &path, const LabeledGraph &g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file '" + path + "'");
  write_graph(out, g);
}

/// FNV-1a over the canonical text form, as 16 hex digits.
inline std::string graph_hash(const LabeledGraph &g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(g)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace divmatch
