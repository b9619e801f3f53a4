#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mucca/graph.hpp"
#include "mucca/rng.hpp"

namespace mucca {

/// Rooted spanning forest over the nodes of a source graph. Each non-root
/// node stores its parent, the parent edge's weight and that edge's id in
/// the source graph.
struct SpanningTree {
  std::vector<Node> roots;
  std::vector<Node> parent;
  std::vector<double> parent_weight;
  std::vector<EdgeId> original_edge_id;

  std::size_t node_count() const noexcept { return parent.size(); }
  bool is_root(Node u) const { return parent[u] == kNoNode; }

  /// The tree as a standalone graph on the same node ids. Edges are listed by
  /// increasing child node.
  WeightedGraph to_graph() const {
    std::vector<Edge> edges;
    edges.reserve(parent.size());
    for (Node u = 0; u < parent.size(); ++u) {
      if (parent[u] != kNoNode) edges.push_back({parent[u], u, parent_weight[u]});
    }
    return WeightedGraph(parent.size(), std::move(edges));
  }
};

/// Returns an empty string when `t` is a valid spanning forest of `g`,
/// otherwise a description of the first violated property.
inline std::string validate_spanning_tree(const WeightedGraph& g, const SpanningTree& t) {
  const std::size_t n = g.node_count();
  if (t.parent.size() != n || t.parent_weight.size() != n || t.original_edge_id.size() != n) {
    return "size mismatch";
  }
  auto comp = component_ids(g);
  std::size_t component_count = 0;
  for (auto c : comp) component_count = std::max<std::size_t>(component_count, c + 1);
  std::vector<int> roots_in(component_count, 0);
  for (Node u = 0; u < n; ++u) {
    if (t.parent[u] == kNoNode) {
      ++roots_in[comp[u]];
      continue;
    }
    EdgeId id = t.original_edge_id[u];
    if (id >= g.edge_count()) return "node " + std::to_string(u) + ": bad edge id";
    const Edge& e = g.edge(id);
    bool joins = (e.u == u && e.v == t.parent[u]) || (e.v == u && e.u == t.parent[u]);
    if (!joins) return "node " + std::to_string(u) + ": edge id does not join node and parent";
    if (e.w != t.parent_weight[u]) return "node " + std::to_string(u) + ": weight mismatch";
  }
  for (std::size_t c = 0; c < component_count; ++c) {
    if (roots_in[c] != 1) return "component " + std::to_string(c) + " has " +
                                 std::to_string(roots_in[c]) + " roots";
  }
  std::vector<Node> listed = t.roots;
  std::sort(listed.begin(), listed.end());
  std::vector<Node> actual;
  for (Node u = 0; u < n; ++u)
    if (t.parent[u] == kNoNode) actual.push_back(u);
  if (listed != actual) return "root list disagrees with parent links";
  // Acyclic: every parent chain reaches a root within n steps.
  std::vector<char> state(n, 0);  // 0 unseen, 1 on current chain, 2 known to reach a root
  std::vector<Node> chain;
  for (Node s = 0; s < n; ++s) {
    Node u = s;
    chain.clear();
    while (state[u] == 0) {
      state[u] = 1;
      chain.push_back(u);
      if (t.parent[u] == kNoNode) break;
      u = t.parent[u];
    }
    if (state[u] == 1 && t.parent[u] != kNoNode) return "cycle through node " + std::to_string(u);
    for (Node v : chain) state[v] = 2;
  }
  return {};
}

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), Node{0});
  }
  Node find(Node x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(Node a, Node b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<Node> parent_;
  std::vector<unsigned char> rank_;
};

/// Orients an unrooted forest given as source-graph edge ids. Each
/// component is rooted at its smallest node unless `preferred_root` lies in it.
inline SpanningTree orient_forest(const WeightedGraph& g, const std::vector<EdgeId>& tree_edges,
                                  const std::vector<Node>& preferred_roots = {}) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> offsets(n + 1, 0);
  for (EdgeId id : tree_edges) {
    ++offsets[g.edge(id).u + 1];
    ++offsets[g.edge(id).v + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<EdgeId> incident(2 * tree_edges.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  for (EdgeId id : tree_edges) {
    incident[fill[g.edge(id).u]++] = id;
    incident[fill[g.edge(id).v]++] = id;
  }

  SpanningTree t;
  t.parent.assign(n, kNoNode);
  t.parent_weight.assign(n, 0.0);
  t.original_edge_id.assign(n, kNoEdge);
  std::vector<char> seen(n, 0);
  std::vector<Node> stack;
  auto grow = [&](Node root) {
    seen[root] = 1;
    t.roots.push_back(root);
    stack.push_back(root);
    while (!stack.empty()) {
      Node u = stack.back();
      stack.pop_back();
      for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
        EdgeId id = incident[i];
        Node v = g.other_end(id, u);
        if (seen[v]) continue;
        seen[v] = 1;
        t.parent[v] = u;
        t.parent_weight[v] = g.edge(id).w;
        t.original_edge_id[v] = id;
        stack.push_back(v);
      }
    }
  };
  for (Node r : preferred_roots)
    if (!seen[r]) grow(r);
  for (Node u = 0; u < n; ++u)
    if (!seen[u]) grow(u);
  std::sort(t.roots.begin(), t.roots.end());
  return t;
}

}  // namespace detail

/// Spanning forest of maximum total similarity, i.e. minimum total
/// resistance sum(1/w). Kruskal over edges by decreasing weight; equal
/// weights are taken in increasing edge id order.
inline SpanningTree max_similarity_spanning_tree(const WeightedGraph& g) {
  std::vector<EdgeId> order(g.edge_count());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](EdgeId a, EdgeId b) { return g.edge(a).w > g.edge(b).w; });
  detail::DisjointSets sets(g.node_count());
  std::vector<EdgeId> kept;
  kept.reserve(g.node_count());
  for (EdgeId id : order) {
    if (sets.unite(g.edge(id).u, g.edge(id).v)) kept.push_back(id);
  }
  return detail::orient_forest(g, kept);
}

/// Weighted uniform spanning forest by Wilson's loop-erased random walks.
/// Each component gets a uniformly chosen root; walk steps pick a neighbor
/// with probability proportional to the edge weight, so a tree is drawn with
/// probability proportional to the product of its edge weights.
inline SpanningTree wilson_random_spanning_tree(const WeightedGraph& g, std::uint64_t seed) {
  const std::size_t n = g.node_count();
  Rng rng(seed);

  // Cumulative neighbor weights, laid out like the adjacency spans.
  std::vector<std::size_t> offsets(n + 1, 0);
  for (Node u = 0; u < n; ++u) offsets[u + 1] = offsets[u] + g.degree(u);
  std::vector<double> cumulative(offsets[n]);
  for (Node u = 0; u < n; ++u) {
    double acc = 0.0;
    auto nbs = g.neighbors(u);
    for (std::size_t i = 0; i < nbs.size(); ++i) {
      acc += nbs[i].weight;
      cumulative[offsets[u] + i] = acc;
    }
  }
  auto step = [&](Node u) -> std::size_t {
    auto begin = cumulative.begin() + static_cast<std::ptrdiff_t>(offsets[u]);
    auto end = cumulative.begin() + static_cast<std::ptrdiff_t>(offsets[u + 1]);
    double target = rng.uniform() * *(end - 1);
    auto it = std::upper_bound(begin, end, target);
    if (it == end) --it;
    return static_cast<std::size_t>(it - begin);
  };

  SpanningTree t;
  t.parent.assign(n, kNoNode);
  t.parent_weight.assign(n, 0.0);
  t.original_edge_id.assign(n, kNoEdge);

  std::vector<char> in_tree(n, 0);
  std::vector<std::size_t> next_slot(n, 0);
  for (const auto& members : connected_components(g)) {
    Node root = members[rng.below(members.size())];
    in_tree[root] = 1;
    t.roots.push_back(root);
    for (Node start : members) {
      Node u = start;
      while (!in_tree[u]) {
        next_slot[u] = step(u);
        u = g.neighbors(u)[next_slot[u]].node;
      }
      u = start;
      while (!in_tree[u]) {
        in_tree[u] = 1;
        const Neighbor& nb = g.neighbors(u)[next_slot[u]];
        t.parent[u] = nb.node;
        t.parent_weight[u] = nb.weight;
        t.original_edge_id[u] = nb.edge;
        u = nb.node;
      }
    }
  }
  std::sort(t.roots.begin(), t.roots.end());
  return t;
}

}  // namespace mucca
