#pragma once

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mucca/graph.hpp"

namespace mucca::io {

namespace detail {

inline std::string_view strip_comment(std::string_view line) {
  if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
  return line;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_uint(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_double(std::string_view s, double& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

}  // namespace detail

/// Parses `u v w` triples, one per line. Blank lines and `#` comments are
/// skipped. Errors name the offending line.
inline WeightedGraph read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = detail::split_ws(detail::strip_comment(line));
    if (fields.empty()) continue;
    Edge e;
    if (fields.size() != 3 || !detail::parse_uint(fields[0], e.u) ||
        !detail::parse_uint(fields[1], e.v)) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected `u v w`, got '" + line + "'");
    }
    if (!detail::parse_double(fields[2], e.w)) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": weight '" + std::string(fields[2]) +
                      "' is not a number");
    }
    edges.push_back(e);
    lines.push_back(line_no);
  }
  return from_edge_list(std::move(edges), lines);
}

inline void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << detail::format_double(e.w) << '\n';
  }
}

/// Parses `node class` lines. Nodes not mentioned stay unrevealed. When
/// class_count is 0 it is inferred as one more than the largest class seen.
inline PartialLabeling read_labels(std::istream& in, std::size_t node_count,
                                   std::size_t class_count = 0) {
  std::vector<std::pair<Node, ClassId>> entries;
  std::string line;
  std::size_t line_no = 0;
  ClassId max_class = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = detail::split_ws(detail::strip_comment(line));
    if (fields.empty()) continue;
    Node u;
    ClassId k;
    if (fields.size() != 2 || !detail::parse_uint(fields[0], u) ||
        !detail::parse_uint(fields[1], k) || k == kNoClass) {
      throw Error(ErrorCode::MalformedLine,
                  "line " + std::to_string(line_no) + ": expected `node class`, got '" + line + "'");
    }
    if (u >= node_count) {
      throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": node " +
                                                std::to_string(u) + " is not in the graph");
    }
    max_class = std::max(max_class, k);
    entries.emplace_back(u, k);
  }
  if (class_count == 0) class_count = entries.empty() ? 1 : std::size_t{max_class} + 1;
  PartialLabeling y(node_count, class_count);
  for (auto [u, k] : entries) y.reveal(u, k);
  return y;
}

inline void write_labels(std::ostream& out, const FullLabeling& y) {
  for (Node u = 0; u < y.size(); ++u) out << u << ' ' << y[u] << '\n';
}

inline void write_labels(std::ostream& out, const PartialLabeling& y) {
  for (Node u = 0; u < y.size(); ++u)
    if (y.is_revealed(u)) out << u << ' ' << y[u] << '\n';
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  return out;
}

}  // namespace mucca::io
