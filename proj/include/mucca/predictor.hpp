#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mucca/graph.hpp"
#include "mucca/hinge.hpp"
#include "mucca/spanning.hpp"

namespace mucca {

namespace detail {

inline ClassId argmax_smallest(const std::vector<double>& scores) {
  return static_cast<ClassId>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

inline double min_weight(const WeightedGraph& tree, std::span<const EdgeId> edges) {
  double m = tree.edge(edges.front()).w;
  for (EdgeId e : edges) m = std::min(m, tree.edge(e).w);
  return m;
}

/// Index of h in d.forks (which is sorted), or kNoNode.
inline Node fork_slot(const HingeDecomposition& d, Node h) {
  if (d.role[h] != NodeRole::Fork) return kNoNode;
  auto it = std::lower_bound(d.forks.begin(), d.forks.end(), h);
  return it != d.forks.end() && *it == h ? static_cast<Node>(it - d.forks.begin()) : kNoNode;
}

inline ClassId hinge_label(Node h, const PartialLabeling& y, const HingeDecomposition& d,
                           const std::vector<ClassId>& fork_labels) {
  if (y.is_revealed(h)) return y[h];
  Node slot = fork_slot(d, h);
  return slot < fork_labels.size() ? fork_labels[slot] : kNoClass;
}

}  // namespace detail

/// Phase-2 class scores of one fork.
///
/// The fork's native hinge tree is its component once every edge touching a
/// revealed node is removed; its connection nodes are the revealed nodes at
/// the other end of those edges. For each connection node the minimum-weight
/// edge of the fork-to-node path is that path's epsilon-edge (on ties, the
/// one nearest the fork). A class scores the summed weight of the distinct
/// epsilon-edges of paths reaching its connection nodes.
inline std::vector<double> fork_scores(const WeightedGraph& tree, const PartialLabeling& y,
                                       const HingeDecomposition& d, Node fork) {
  struct Frame {
    Node node;
    EdgeId via;
    EdgeId eps;
  };
  std::vector<std::pair<EdgeId, ClassId>> reached;
  std::vector<Frame> stack{{fork, kNoEdge, kNoEdge}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : tree.neighbors(f.node)) {
      // Only black-line edges lead to revealed nodes.
      if (nb.edge == f.via || !d.black_line[nb.edge]) continue;
      EdgeId eps = f.eps;
      if (eps == kNoEdge || nb.weight < tree.edge(eps).w) eps = nb.edge;
      if (y.is_revealed(nb.node)) {
        reached.emplace_back(eps, y[nb.node]);
      } else {
        stack.push_back({nb.node, nb.edge, eps});
      }
    }
  }
  std::sort(reached.begin(), reached.end());
  reached.erase(std::unique(reached.begin(), reached.end()), reached.end());
  std::vector<double> scores(y.class_count(), 0.0);
  for (auto [eps, k] : reached) scores[k] += tree.edge(eps).w;
  return scores;
}

/// Phase 2: each fork takes its top-scoring class, smallest id on ties.
/// Result is aligned with d.forks.
inline std::vector<ClassId> label_forks(const WeightedGraph& tree, const PartialLabeling& y,
                                        const HingeDecomposition& d) {
  std::vector<ClassId> labels;
  labels.reserve(d.forks.size());
  for (Node f : d.forks) labels.push_back(detail::argmax_smallest(fork_scores(tree, y, d, f)));
  return labels;
}

/// Makes every fork a best response on the hinge-line skeleton.
///
/// A fork whose incident hinge lines end at class-k hinge nodes can lose at
/// most the epsilon-weight of each such line once the lines are cut, so the
/// fork is stable when its class maximizes the summed epsilon-weight of
/// lines ending in that class. Forks sharing a hinge line are coupled; they
/// are relabeled one at a time until none can strictly gain. Each move raises
/// the skeleton's total agreement, so the loop terminates. Returns the number
/// of relabelings.
inline std::size_t settle_forks(const WeightedGraph& tree, const PartialLabeling& y,
                                const HingeDecomposition& d, std::vector<ClassId>& fork_labels) {
  if (d.forks.empty()) return 0;

  struct Incident {
    Node other;
    Node other_slot;  // kNoNode unless the other end is a fork
    double eps;
  };
  std::vector<std::vector<Incident>> incident(d.forks.size());
  for (std::size_t i = 0; i < d.hinge_lines.size(); ++i) {
    HingeLineView line = d.hinge_lines[i];
    Node a = detail::fork_slot(d, line.front()), b = detail::fork_slot(d, line.back());
    if (a == kNoNode && b == kNoNode) continue;
    double eps = detail::min_weight(tree, line.edges);
    if (a != kNoNode) incident[a].push_back({line.back(), b, eps});
    if (b != kNoNode) incident[b].push_back({line.front(), a, eps});
  }

  std::vector<Node> work(d.forks.size());
  std::iota(work.begin(), work.end(), Node{0});
  std::vector<char> queued(d.forks.size(), 1);
  std::vector<double> scores(y.class_count());
  std::size_t moves = 0;
  const std::size_t move_cap = 1000 * d.forks.size() * y.class_count() + 1000;
  while (!work.empty()) {
    Node f = work.back();
    work.pop_back();
    queued[f] = 0;
    std::fill(scores.begin(), scores.end(), 0.0);
    for (const Incident& inc : incident[f]) {
      scores[inc.other_slot != kNoNode ? fork_labels[inc.other_slot] : y[inc.other]] += inc.eps;
    }
    ClassId best = detail::argmax_smallest(scores);
    if (!(scores[best] > scores[fork_labels[f]])) continue;
    fork_labels[f] = best;
    if (++moves > move_cap) throw std::logic_error("settle_forks: no convergence");
    for (const Incident& inc : incident[f]) {
      Node s = inc.other_slot;
      if (s != kNoNode && !queued[s]) {
        queued[s] = 1;
        work.push_back(s);
      }
    }
  }
  return moves;
}

/// Phase 3: labels hinge nodes and hinge-line interiors. Result holds
/// kNoClass for grafted and unanchored nodes.
///
/// Lines with equal end labels are labeled uniformly. Otherwise the line is
/// cut at a minimum-weight edge: nodes before it take the start label, the
/// rest the end label. When several edges share the minimum weight, the cut
/// goes to the tied edge closest to where a nearest-endpoint split (by
/// resistance distance, ties to the start) would put it; ties between two
/// such edges go to the one nearer the start.
inline std::vector<ClassId> cut_hinge_lines(const WeightedGraph& tree, const PartialLabeling& y,
                                            const HingeDecomposition& d,
                                            const std::vector<ClassId>& fork_labels) {
  const std::size_t n = tree.node_count();
  std::vector<ClassId> out(n, kNoClass);
  auto label_of = [&](Node h) {
    ClassId k = detail::hinge_label(h, y, d, fork_labels);
    if (k == kNoClass) {
      throw Error(ErrorCode::UnlabeledHingeNode, "hinge node " + std::to_string(h) + " has no label");
    }
    return k;
  };
  for (Node u = 0; u < n; ++u)
    if (d.is_hinge(u)) out[u] = label_of(u);

  for (std::size_t i = 0; i < d.hinge_lines.size(); ++i) {
    HingeLineView line = d.hinge_lines[i];
    const ClassId start = out[line.front()];
    const ClassId end = out[line.back()];
    auto interior = line.interior();
    if (interior.empty()) continue;
    if (start == end) {
      for (Node u : interior) out[u] = start;
      continue;
    }
    const double eps = detail::min_weight(tree, line.edges);
    double total_resistance = 0.0;
    for (EdgeId e : line.edges) total_resistance += 1.0 / tree.edge(e).w;
    // Edge j joins nodes[j] and nodes[j+1]; cutting at j gives interior
    // nodes 1..j the start label. `natural` is the cut a nearest-endpoint
    // rule would make.
    std::size_t natural = 0;
    double from_start = 0.0;
    for (std::size_t j = 1; j + 1 < line.nodes.size(); ++j) {
      from_start += 1.0 / tree.edge(line.edges[j - 1]).w;
      if (from_start <= total_resistance - from_start) natural = j;
    }
    std::size_t cut = line.edges.size();
    std::size_t best_gap = line.edges.size() + 1;
    for (std::size_t j = 0; j < line.edges.size(); ++j) {
      if (tree.edge(line.edges[j]).w != eps) continue;
      std::size_t gap = j > natural ? j - natural : natural - j;
      if (gap < best_gap) {
        best_gap = gap;
        cut = j;
      }
    }
    for (std::size_t j = 1; j + 1 < line.nodes.size(); ++j) out[line.nodes[j]] = j <= cut ? start : end;
  }
  return out;
}

/// Phase 4: grafted trees copy the label of the node they hang from.
/// Components without any revealed node get the training plurality class.
inline FullLabeling label_grafted(const WeightedGraph& tree, const PartialLabeling& y,
                                  const HingeDecomposition& d, std::vector<ClassId> partial) {
  (void)tree;
  const ClassId fallback = y.plurality_class();
  for (Node u = 0; u < partial.size(); ++u) {
    switch (d.role[u]) {
      case NodeRole::Grafted: partial[u] = partial[d.attachment[u]]; break;
      case NodeRole::Unanchored: partial[u] = fallback; break;
      default: break;
    }
  }
  return FullLabeling(std::move(partial), y.class_count());
}

struct PredictOptions {
  // Off reproduces the independent per-fork Phase-2 choice only.
  bool settle_forks = true;
};

/// Runs the four phases on a forest given as a graph.
inline FullLabeling predict_on_tree(const WeightedGraph& tree, const PartialLabeling& y,
                                    const PredictOptions& options = {}) {
  HingeDecomposition d = decompose(tree, y);
  std::vector<ClassId> fork_labels = label_forks(tree, y, d);
  if (options.settle_forks) settle_forks(tree, y, d, fork_labels);
  return label_grafted(tree, y, d, cut_hinge_lines(tree, y, d, fork_labels));
}

inline FullLabeling predict(const SpanningTree& t, const PartialLabeling& y,
                            const PredictOptions& options = {}) {
  return predict_on_tree(t.to_graph(), y, options);
}

}  // namespace mucca
