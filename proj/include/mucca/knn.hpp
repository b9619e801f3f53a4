#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mucca/graph.hpp"
#include "mucca/io.hpp"

namespace mucca {

/// m x d real features with an optional class per row.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<std::optional<ClassId>> labels;  // empty, or one entry per row

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * cols, cols);
  }
  bool has_labels() const { return !labels.empty(); }

  /// Labeled rows as a partial labeling over graph nodes 0..rows-1.
  PartialLabeling label_set() const {
    ClassId max_class = 0;
    for (const auto& k : labels)
      if (k) max_class = std::max(max_class, *k);
    PartialLabeling y(rows, std::size_t{max_class} + 1);
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i]) y.reveal(static_cast<Node>(i), *labels[i]);
    return y;
  }
};

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front())))
      field.remove_prefix(1);
    while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back())))
      field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Reads comma-separated numeric rows. A first row containing a non-numeric
/// field is a header; a header column named `label` holds integer class ids,
/// left empty for unlabeled rows.
inline FeatureMatrix load_features(std::istream& in) {
  FeatureMatrix out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> label_col;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = detail::split_csv(line);
    if (first) {
      first = false;
      double probe;
      bool header = std::any_of(fields.begin(), fields.end(), [&](std::string_view f) {
        return !io::detail::parse_double(f, probe);
      });
      width = fields.size();
      if (header) {
        for (std::size_t c = 0; c < fields.size(); ++c)
          if (fields[c] == "label") label_col = c;
        out.cols = width - (label_col ? 1 : 0);
        continue;
      }
      out.cols = width;
    }
    if (fields.size() != width) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": " +
                                               std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(width));
    }
    std::optional<ClassId> label;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (label_col && c == *label_col) {
        if (!fields[c].empty()) {
          ClassId k;
          if (!io::detail::parse_uint(fields[c], k) || k == kNoClass) {
            throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": label '" +
                                                     std::string(fields[c]) + "' is not a class id");
          }
          label = k;
        }
        continue;
      }
      double v;
      if (!io::detail::parse_double(fields[c], v) || !std::isfinite(v)) {
        throw Error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) + ": field '" +
                                                 std::string(fields[c]) + "' is not a finite number");
      }
      out.values.push_back(v);
    }
    if (label_col) out.labels.push_back(label);
    ++out.rows;
  }
  if (out.rows == 0) throw Error(ErrorCode::EmptyInput, "no feature rows");
  if (out.cols == 0) throw Error(ErrorCode::MalformedRow, "rows have no feature columns");
  return out;
}

inline FeatureMatrix load_features(const std::string& path) {
  auto in = io::open_input(path);
  return load_features(in);
}

inline double euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Symmetrized k-nearest-neighbor similarity graph.
///
/// Each row picks its min(k, m-1) nearest rows by Euclidean distance (ties
/// to the smaller id); an edge exists when either endpoint picked the other.
/// Edge {i,j} gets weight exp(-d_ij / sigma_ij^2), where sigma_ij is the mean
/// distance over the graph edges incident to i or j. Coincident points give
/// weight 1.
inline WeightedGraph knn_graph(const FeatureMatrix& feats, std::size_t k) {
  const std::size_t m = feats.rows;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (m < 2) throw Error(ErrorCode::InvalidArgument, "need at least two rows");
  const std::size_t kk = std::min(k, m - 1);

  struct Candidate {
    double dist;
    Node node;
    bool operator<(const Candidate& o) const { return dist != o.dist ? dist < o.dist : node < o.node; }
  };
  std::vector<std::pair<Node, Node>> pairs;
  std::vector<double> pair_dist;
  pairs.reserve(m * kk);
  std::vector<Candidate> cand(m - 1);
  for (Node i = 0; i < m; ++i) {
    std::size_t c = 0;
    for (Node j = 0; j < m; ++j) {
      if (j == i) continue;
      double d = euclidean(feats.row(i), feats.row(j));
      if (std::isnan(d)) {
        throw Error(ErrorCode::DegenerateFeatures,
                    "distance between rows " + std::to_string(i) + " and " + std::to_string(j) + " is NaN");
      }
      cand[c++] = {d, j};
    }
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(kk), cand.end());
    for (std::size_t t = 0; t < kk; ++t) {
      pairs.emplace_back(std::min(i, cand[t].node), std::max(i, cand[t].node));
      pair_dist.push_back(cand[t].dist);
    }
  }
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });

  std::vector<std::pair<Node, Node>> ends;
  std::vector<double> dist;
  for (std::size_t idx : order) {
    if (!ends.empty() && ends.back() == pairs[idx]) continue;
    ends.push_back(pairs[idx]);
    dist.push_back(pair_dist[idx]);
  }

  std::vector<double> incident_sum(m, 0.0);
  std::vector<std::size_t> incident_count(m, 0);
  for (std::size_t e = 0; e < ends.size(); ++e) {
    auto [a, b] = ends[e];
    incident_sum[a] += dist[e];
    incident_sum[b] += dist[e];
    ++incident_count[a];
    ++incident_count[b];
  }
  std::vector<Edge> edges;
  edges.reserve(ends.size());
  for (std::size_t e = 0; e < ends.size(); ++e) {
    auto [a, b] = ends[e];
    const double sigma = (incident_sum[a] + incident_sum[b] - dist[e]) /
                         static_cast<double>(incident_count[a] + incident_count[b] - 1);
    double w = dist[e] == 0.0 ? 1.0 : std::exp(-dist[e] / (sigma * sigma));
    if (std::isnan(w)) {
      throw Error(ErrorCode::DegenerateFeatures, "NaN weight on edge " + std::to_string(a) + "-" +
                                                     std::to_string(b));
    }
    // Far-apart pairs at a small scale can underflow; keep the edge positive.
    w = std::max(w, std::numeric_limits<double>::min());
    edges.push_back({a, b, w});
  }
  return WeightedGraph(m, std::move(edges));
}

}  // namespace mucca
