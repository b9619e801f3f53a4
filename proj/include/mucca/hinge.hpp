#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mucca/graph.hpp"

namespace mucca {

enum class NodeRole : std::uint8_t {
  Revealed,
  Fork,
  LineInterior,
  Grafted,
  // In a tree component without any revealed node.
  Unanchored,
};

struct HingeLineView {
  std::span<const Node> nodes;
  std::span<const EdgeId> edges;

  Node front() const { return nodes.front(); }
  Node back() const { return nodes.back(); }
  std::span<const Node> interior() const { return nodes.subspan(1, nodes.size() - 2); }
};

/// Hinge lines stored back to back. Line i has nodes[node_offset[i] ..
/// node_offset[i+1]) and one edge fewer than nodes.
class HingeLines {
 public:
  std::size_t size() const noexcept { return offsets_.size() - 1; }

  HingeLineView operator[](std::size_t i) const {
    std::size_t begin = offsets_[i], end = offsets_[i + 1];
    return {std::span<const Node>(nodes_).subspan(begin, end - begin),
            std::span<const EdgeId>(edges_).subspan(begin - i, end - begin - 1)};
  }

  void reserve(std::size_t lines, std::size_t edges) {
    offsets_.reserve(lines + 1);
    nodes_.reserve(edges + lines);
    edges_.reserve(edges);
  }
  void begin_line(Node start) { nodes_.push_back(start); }
  void extend(EdgeId via, Node next) {
    edges_.push_back(via);
    nodes_.push_back(next);
  }
  void end_line() { offsets_.push_back(nodes_.size()); }

 private:
  std::vector<Node> nodes_;
  std::vector<EdgeId> edges_;
  std::vector<std::size_t> offsets_{0};
};

/// Annotation of a tree by revealed nodes.
///
/// The black-line edges are the edges lying on a path between two revealed
/// nodes. Hinge nodes are the revealed nodes plus the forks (unrevealed nodes
/// with at least three incident black-line edges). Hinge lines are the
/// maximal black-line paths whose interiors avoid hinge nodes. Every other
/// node hangs off exactly one black-line node (or a lone revealed node) in a
/// grafted tree.
struct HingeDecomposition {
  std::vector<char> black_line;  // per tree edge
  std::vector<std::uint32_t> black_degree;
  std::vector<Node> forks;
  std::vector<NodeRole> role;
  HingeLines hinge_lines;
  // Grafted node -> node of the revealed-spanning subtree it hangs off.
  std::vector<Node> attachment;

  bool is_hinge(Node u) const { return role[u] == NodeRole::Revealed || role[u] == NodeRole::Fork; }
};

namespace detail {

/// Depth-first preorder of every component plus the tree edge to each
/// node's parent (kNoEdge at component roots). Components occupy contiguous
/// runs of the preorder, each starting at its root.
struct TreeOrder {
  std::vector<Node> preorder;
  std::vector<EdgeId> parent_edge;
  std::vector<Node> parent;
  std::size_t components = 0;
};

inline TreeOrder tree_order(const WeightedGraph& tree) {
  const std::size_t n = tree.node_count();
  TreeOrder order;
  order.preorder.reserve(n);
  order.parent_edge.assign(n, kNoEdge);
  order.parent.assign(n, kNoNode);
  // A node is visited once its parent is set; roots point at themselves
  // until their component is done.
  std::vector<Node> stack;
  for (Node s = 0; s < n; ++s) {
    if (order.parent[s] != kNoNode) continue;
    order.parent[s] = s;
    ++order.components;
    stack.push_back(s);
    while (!stack.empty()) {
      Node u = stack.back();
      stack.pop_back();
      order.preorder.push_back(u);
      for (const Link& nb : tree.links(u)) {
        if (order.parent[nb.node] != kNoNode) continue;
        order.parent[nb.node] = u;
        order.parent_edge[nb.node] = nb.edge;
        stack.push_back(nb.node);
      }
    }
    order.parent[s] = kNoNode;
  }
  return order;
}

inline void require_size(const WeightedGraph& tree, const PartialLabeling& y) {
  if (y.size() != tree.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "labeling size " + std::to_string(y.size()) +
                                                " does not match node count " +
                                                std::to_string(tree.node_count()));
  }
}

inline void require_forest(const WeightedGraph& tree, const TreeOrder& order) {
  if (tree.edge_count() + order.components != tree.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "graph is not a forest");
  }
}

}  // namespace detail

/// Phase 1: flags black-line edges and finds the forks. Fills black_line,
/// black_degree, forks and the Revealed/Fork roles; other nodes are left
/// Unanchored until trace_hinge_lines and attach_grafted run. Linear time.
inline HingeDecomposition mark_black_lines(const WeightedGraph& tree, const PartialLabeling& y) {
  detail::require_size(tree, y);
  const std::size_t n = tree.node_count();
  auto order = detail::tree_order(tree);
  detail::require_forest(tree, order);
  if (y.revealed_count() == 0) throw Error(ErrorCode::NoRevealedNodes, "no training labels");

  // Revealed count below each node.
  std::vector<std::uint32_t> below(n, 0);
  for (auto it = order.preorder.rbegin(); it != order.preorder.rend(); ++it) {
    if (y.is_revealed(*it)) ++below[*it];
    if (order.parent[*it] != kNoNode) below[order.parent[*it]] += below[*it];
  }

  HingeDecomposition d;
  d.black_line.assign(tree.edge_count(), 0);
  d.black_degree.assign(n, 0);
  d.role.assign(n, NodeRole::Unanchored);
  d.attachment.assign(n, kNoNode);
  std::uint32_t component_total = 0;
  for (Node u : order.preorder) {
    EdgeId e = order.parent_edge[u];
    if (e == kNoEdge) {
      component_total = below[u];
      continue;
    }
    // The edge to the parent separates `below[u]` revealed nodes from the rest.
    if (below[u] > 0 && below[u] < component_total) {
      d.black_line[e] = 1;
      ++d.black_degree[u];
      ++d.black_degree[order.parent[u]];
    }
  }
  for (Node u = 0; u < n; ++u) {
    if (y.is_revealed(u)) {
      d.role[u] = NodeRole::Revealed;
    } else if (d.black_degree[u] >= 3) {
      d.role[u] = NodeRole::Fork;
      d.forks.push_back(u);
    }
  }
  return d;
}

/// Walks every black-line path between consecutive hinge nodes. Each line is
/// recorded once, starting at the hinge node met first in id order.
inline void trace_hinge_lines(const WeightedGraph& tree, HingeDecomposition& d) {
  std::size_t black_edges = 0, hinge_ends = 0;
  for (char b : d.black_line) black_edges += b != 0;
  for (Node h = 0; h < tree.node_count(); ++h)
    if (d.is_hinge(h)) hinge_ends += d.black_degree[h];
  d.hinge_lines.reserve(hinge_ends / 2, black_edges);
  for (Node h = 0; h < tree.node_count(); ++h) {
    if (!d.is_hinge(h)) continue;
    for (const Link& first : tree.links(h)) {
      if (!d.black_line[first.edge]) continue;
      // Already traced from the other end: the first interior node is
      // marked, or a one-edge line starts at the smaller hinge.
      if (d.role[first.node] == NodeRole::LineInterior) continue;
      if (d.is_hinge(first.node) && first.node < h) continue;
      d.hinge_lines.begin_line(h);
      EdgeId via = first.edge;
      Node cur = first.node;
      for (;;) {
        d.hinge_lines.extend(via, cur);
        if (d.is_hinge(cur)) break;
        d.role[cur] = NodeRole::LineInterior;
        // Interior nodes have exactly two black-line edges.
        EdgeId next_edge = kNoEdge;
        Node next = kNoNode;
        for (const Link& nb : tree.links(cur)) {
          if (d.black_line[nb.edge] && nb.edge != via) {
            next_edge = nb.edge;
            next = nb.node;
            break;
          }
        }
        via = next_edge;
        cur = next;
      }
      d.hinge_lines.end_line();
    }
  }
}

/// Assigns every node off the revealed-spanning subtree to the subtree node
/// its grafted tree hangs from.
inline void attach_grafted(const WeightedGraph& tree, HingeDecomposition& d) {
  auto anchored = [&](Node u) { return d.role[u] == NodeRole::Revealed || d.black_degree[u] > 0; };
  std::vector<Node> queue;
  for (Node u = 0; u < tree.node_count(); ++u) {
    if (!anchored(u) || tree.degree(u) == d.black_degree[u]) continue;
    for (const Link& nb : tree.links(u)) {
      if (anchored(nb.node)) continue;
      d.role[nb.node] = NodeRole::Grafted;
      d.attachment[nb.node] = u;
      queue.push_back(nb.node);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      Node g = queue[head];
      for (const Link& nb : tree.links(g)) {
        if (d.role[nb.node] == NodeRole::Grafted || anchored(nb.node)) continue;
        d.role[nb.node] = NodeRole::Grafted;
        d.attachment[nb.node] = d.attachment[g];
        queue.push_back(nb.node);
      }
    }
    queue.clear();
  }
}

/// Full decomposition: black lines, forks, hinge lines and grafted trees.
inline HingeDecomposition decompose(const WeightedGraph& tree, const PartialLabeling& y) {
  HingeDecomposition d = mark_black_lines(tree, y);
  trace_hinge_lines(tree, d);
  attach_grafted(tree, d);
  return d;
}

}  // namespace mucca
