#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mucca/error.hpp"

namespace mucca {

using Node = std::uint32_t;
using EdgeId = std::uint32_t;
using ClassId = std::uint32_t;

inline constexpr Node kNoNode = std::numeric_limits<Node>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
inline constexpr ClassId kNoClass = std::numeric_limits<ClassId>::max();

struct Edge {
  Node u = 0;
  Node v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  Node node;
  double weight;
  EdgeId edge;
};

/// Weightless adjacency entry, half the size of Neighbor.
struct Link {
  Node node;
  EdgeId edge;
};

/// Undirected graph with strictly positive similarity weights.
///
/// Nodes are the dense integers 0..n-1. Adjacency is stored in compressed
/// form so that neighbors(u) is a contiguous span; every edge appears once in
/// the adjacency of each endpoint and carries its index into edges().
class WeightedGraph {
 public:
  WeightedGraph() = default;

  /// Validates and builds. `source_lines`, when given, holds the input line
  /// number of each edge and is used in error messages.
  WeightedGraph(std::size_t node_count, std::vector<Edge> edges,
                std::span<const std::size_t> source_lines = {})
      : n_(node_count), edges_(std::move(edges)) {
    auto where = [&](std::size_t i) {
      if (i < source_lines.size()) return "line " + std::to_string(source_lines[i]);
      return "edge #" + std::to_string(i);
    };
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      if (!(e.w > 0.0) || !std::isfinite(e.w)) {
        throw Error(ErrorCode::NonPositiveWeight,
                    where(i) + ": weight " + std::to_string(e.w) + " is not a positive finite real");
      }
      if (e.u == e.v) {
        throw Error(ErrorCode::SelfLoop, where(i) + ": self-loop on node " + std::to_string(e.u));
      }
      if (e.u >= n_ || e.v >= n_) {
        throw Error(ErrorCode::InvalidArgument, where(i) + ": node id out of range");
      }
    }
    if (edges_.size() > std::numeric_limits<EdgeId>::max() - 1) {
      throw Error(ErrorCode::TooLarge, "too many edges");
    }

    std::vector<EdgeId> order(edges_.size());
    std::iota(order.begin(), order.end(), EdgeId{0});
    auto key = [&](EdgeId id) {
      const Edge& e = edges_[id];
      return std::pair(std::min(e.u, e.v), std::max(e.u, e.v));
    };
    std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
      auto ka = key(a), kb = key(b);
      return ka != kb ? ka < kb : a < b;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (key(order[i]) == key(order[i - 1])) {
        auto [a, b] = key(order[i]);
        throw Error(ErrorCode::DuplicateEdge, where(order[i]) + ": edge {" + std::to_string(a) +
                                                  "," + std::to_string(b) + "} already given at " +
                                                  where(order[i - 1]));
      }
    }

    offsets_.assign(n_ + 1, 0);
    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    links_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const Edge& e = edges_[id];
      links_[fill[e.u]] = Link{e.v, id};
      adjacency_[fill[e.u]++] = Neighbor{e.v, e.w, id};
      links_[fill[e.v]] = Link{e.u, id};
      adjacency_[fill[e.v]++] = Neighbor{e.u, e.w, id};
    }
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(EdgeId id) const { return edges_[id]; }

  std::span<const Neighbor> neighbors(Node u) const {
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
  }
  /// Same order as neighbors(u), without weights; for traversals.
  std::span<const Link> links(Node u) const {
    return std::span<const Link>(links_).subspan(offsets_[u], offsets_[u + 1] - offsets_[u]);
  }
  std::size_t degree(Node u) const { return offsets_[u + 1] - offsets_[u]; }

  Node other_end(EdgeId id, Node u) const {
    const Edge& e = edges_[id];
    return e.u == u ? e.v : e.u;
  }

  double total_weight() const {
    double sum = 0.0;
    for (const Edge& e : edges_) sum += e.w;
    return sum;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<Link> links_;
};

/// Builds a graph whose node count is one more than the largest id mentioned.
inline WeightedGraph from_edge_list(std::vector<Edge> edges,
                                    std::span<const std::size_t> source_lines = {}) {
  std::size_t n = 0;
  for (const Edge& e : edges) n = std::max<std::size_t>(n, std::max(e.u, e.v) + std::size_t{1});
  return WeightedGraph(n, std::move(edges), source_lines);
}

/// Per-node optional class id. The revealed nodes form the training set.
class PartialLabeling {
 public:
  PartialLabeling() = default;
  PartialLabeling(std::size_t node_count, std::size_t class_count)
      : labels_(node_count, kNoClass), class_count_(class_count) {}

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }

  void reveal(Node u, ClassId k) {
    if (u >= labels_.size()) throw Error(ErrorCode::InvalidArgument, "node out of range");
    if (k >= class_count_) {
      throw Error(ErrorCode::InvalidArgument,
                  "class " + std::to_string(k) + " outside 0.." + std::to_string(class_count_ - 1));
    }
    if (labels_[u] == kNoClass) ++revealed_;
    labels_[u] = k;
  }
  void hide(Node u) {
    if (labels_[u] != kNoClass) --revealed_;
    labels_[u] = kNoClass;
  }

  bool is_revealed(Node u) const { return labels_[u] != kNoClass; }
  /// kNoClass when unrevealed.
  ClassId operator[](Node u) const { return labels_[u]; }
  std::optional<ClassId> at(Node u) const {
    if (labels_[u] == kNoClass) return std::nullopt;
    return labels_[u];
  }

  std::size_t revealed_count() const noexcept { return revealed_; }
  std::vector<Node> revealed_nodes() const {
    std::vector<Node> out;
    out.reserve(revealed_);
    for (Node u = 0; u < labels_.size(); ++u)
      if (labels_[u] != kNoClass) out.push_back(u);
    return out;
  }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(class_count_, 0);
    for (ClassId k : labels_)
      if (k != kNoClass) ++counts[k];
    return counts;
  }

  /// Most frequent revealed class, smallest id on ties.
  ClassId plurality_class() const {
    if (revealed_ == 0) throw Error(ErrorCode::NoRevealedNodes, "training set is empty");
    auto counts = class_counts();
    return static_cast<ClassId>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }

 private:
  std::vector<ClassId> labels_;
  std::size_t class_count_ = 0;
  std::size_t revealed_ = 0;
};

/// Total labeling: every node carries a class id.
class FullLabeling {
 public:
  FullLabeling() = default;
  FullLabeling(std::vector<ClassId> labels, std::size_t class_count)
      : labels_(std::move(labels)), class_count_(class_count) {
    for (ClassId k : labels_) {
      if (k >= class_count_) {
        throw Error(ErrorCode::InvalidArgument, "label " + std::to_string(k) + " out of range");
      }
    }
  }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t class_count() const noexcept { return class_count_; }
  ClassId operator[](Node u) const { return labels_[u]; }
  std::span<const ClassId> labels() const noexcept { return labels_; }

  friend bool operator==(const FullLabeling&, const FullLabeling&) = default;

 private:
  std::vector<ClassId> labels_;
  std::size_t class_count_ = 0;
};

/// Sum of weights on label-disagreeing edges over the total edge weight.
inline double weighted_cut_fraction(const WeightedGraph& g, const FullLabeling& y) {
  if (g.edge_count() == 0) throw Error(ErrorCode::EmptyGraph, "graph has no edges");
  double cut = 0.0, total = 0.0;
  for (const Edge& e : g.edges()) {
    total += e.w;
    if (y[e.u] != y[e.v]) cut += e.w;
  }
  return cut / total;
}

/// Component index per node, numbered in order of smallest member.
inline std::vector<std::uint32_t> component_ids(const WeightedGraph& g) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(g.node_count(), kUnset);
  std::vector<Node> stack;
  std::uint32_t next = 0;
  for (Node s = 0; s < g.node_count(); ++s) {
    if (comp[s] != kUnset) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      Node u = stack.back();
      stack.pop_back();
      for (const Link& nb : g.links(u)) {
        if (comp[nb.node] == kUnset) {
          comp[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return comp;
}

/// Partition of the nodes by reachability; each set sorted ascending.
inline std::vector<std::vector<Node>> connected_components(const WeightedGraph& g) {
  auto comp = component_ids(g);
  std::uint32_t count = 0;
  for (auto c : comp) count = std::max(count, c + 1);
  std::vector<std::vector<Node>> out(count);
  for (Node u = 0; u < comp.size(); ++u) out[comp[u]].push_back(u);
  return out;
}

/// True when g has no cycles.
inline bool is_forest(const WeightedGraph& g) {
  auto comp = component_ids(g);
  std::size_t count = 0;
  for (auto c : comp) count = std::max<std::size_t>(count, std::size_t{c} + 1);
  return g.edge_count() + count == g.node_count();
}

}  // namespace mucca
