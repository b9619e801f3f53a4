#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mucca/graph.hpp"

namespace mucca {

/// n x c matrix of class scores, row-major.
class ScoreTable {
 public:
  ScoreTable() = default;
  ScoreTable(std::size_t n, std::size_t c) : n_(n), c_(c), s_(n * c, 0.0) {}

  std::size_t node_count() const noexcept { return n_; }
  std::size_t class_count() const noexcept { return c_; }
  double operator()(Node i, ClassId k) const { return s_[std::size_t{i} * c_ + k]; }
  double& operator()(Node i, ClassId k) { return s_[std::size_t{i} * c_ + k]; }
  std::span<const double> row(Node i) const {
    return std::span<const double>(s_).subspan(std::size_t{i} * c_, c_);
  }

  /// Column k as a per-node vector.
  std::vector<double> column(ClassId k) const {
    std::vector<double> out(n_);
    for (Node i = 0; i < n_; ++i) out[i] = (*this)(i, k);
    return out;
  }

 private:
  std::size_t n_ = 0;
  std::size_t c_ = 0;
  std::vector<double> s_;
};

/// Weighted majority vote over revealed neighbors. Unrevealed nodes with no
/// revealed neighbor take the training plurality; ties go to the smallest
/// class. Theta(|E|).
inline FullLabeling wmv_predict(const WeightedGraph& g, const PartialLabeling& y) {
  if (y.revealed_count() == 0) throw Error(ErrorCode::NoRevealedNodes, "no training labels");
  const ClassId fallback = y.plurality_class();
  std::vector<ClassId> labels(g.node_count());
  std::vector<double> votes(y.class_count());
  for (Node i = 0; i < g.node_count(); ++i) {
    if (y.is_revealed(i)) {
      labels[i] = y[i];
      continue;
    }
    std::fill(votes.begin(), votes.end(), 0.0);
    bool any = false;
    for (const Neighbor& nb : g.neighbors(i)) {
      if (!y.is_revealed(nb.node)) continue;
      votes[y[nb.node]] += nb.weight;
      any = true;
    }
    labels[i] = any ? static_cast<ClassId>(std::max_element(votes.begin(), votes.end()) -
                                           votes.begin())
                    : fallback;
  }
  return FullLabeling(std::move(labels), y.class_count());
}

/// E(f) = 1/2 sum over ordered neighbor pairs of w_ij (f_i - f_j)^2, i.e.
/// each undirected edge contributes w (f_u - f_v)^2 once.
inline double harmonic_energy(const WeightedGraph& g, std::span<const double> f) {
  double e = 0.0;
  for (const Edge& edge : g.edges()) {
    double d = f[edge.u] - f[edge.v];
    e += edge.w * d * d;
  }
  return e;
}

struct LabelPropagationResult {
  ScoreTable scores;
  FullLabeling labels;
  std::size_t sweeps = 0;
  double residual = 0.0;
};

struct LabelPropagationOptions {
  double tol = 1e-6;
  std::size_t max_iters = 10000;
  // Called after every sweep of class k with the current scores of that class.
  std::function<void(ClassId, std::span<const double>)> on_sweep;
};

/// One-vs-rest harmonic label propagation.
///
/// For each class k, f_k is clamped to 1 on revealed class-k nodes and 0 on
/// other revealed nodes; unrevealed nodes are relaxed in place, in node
/// order, to the weighted mean of their neighbors until a sweep changes no
/// value by tol or more. Nodes in components without any revealed node keep
/// score 0 and take the training plurality. Labels are the per-node argmax,
/// smallest class on ties.
inline LabelPropagationResult label_propagation(const WeightedGraph& g, const PartialLabeling& y,
                                                const LabelPropagationOptions& options = {}) {
  if (y.revealed_count() == 0) throw Error(ErrorCode::NoRevealedNodes, "no training labels");
  const std::size_t n = g.node_count();
  const std::size_t c = y.class_count();

  auto comp = component_ids(g);
  std::vector<char> anchored_component(n, 0);
  for (Node i = 0; i < n; ++i)
    if (y.is_revealed(i)) anchored_component[comp[i]] = 1;
  std::vector<Node> free;
  std::vector<double> degree(n, 0.0);
  for (Node i = 0; i < n; ++i) {
    if (y.is_revealed(i) || !anchored_component[comp[i]]) continue;
    free.push_back(i);
    for (const Neighbor& nb : g.neighbors(i)) degree[i] += nb.weight;
  }

  LabelPropagationResult result;
  result.scores = ScoreTable(n, c);
  std::vector<double> f(n);
  for (ClassId k = 0; k < c; ++k) {
    for (Node i = 0; i < n; ++i) f[i] = (y.is_revealed(i) && y[i] == k) ? 1.0 : 0.0;
    double change = 0.0;
    std::size_t sweep = 0;
    do {
      if (sweep == options.max_iters) {
        throw NotConverged(change, "label propagation for class " + std::to_string(k) +
                                       " still changing by " + std::to_string(change) +
                                       " after " + std::to_string(sweep) + " sweeps");
      }
      change = 0.0;
      for (Node i : free) {
        double acc = 0.0;
        for (const Neighbor& nb : g.neighbors(i)) acc += nb.weight * f[nb.node];
        double updated = acc / degree[i];
        change = std::max(change, std::abs(updated - f[i]));
        f[i] = updated;
      }
      ++sweep;
      if (options.on_sweep) options.on_sweep(k, f);
    } while (change >= options.tol);
    result.sweeps = std::max(result.sweeps, sweep);
    result.residual = std::max(result.residual, change);
    for (Node i = 0; i < n; ++i) result.scores(i, k) = f[i];
  }

  const ClassId fallback = y.plurality_class();
  std::vector<ClassId> labels(n);
  for (Node i = 0; i < n; ++i) {
    if (y.is_revealed(i)) {
      labels[i] = y[i];
    } else if (!anchored_component[comp[i]]) {
      labels[i] = fallback;
    } else {
      auto r = result.scores.row(i);
      labels[i] = static_cast<ClassId>(std::max_element(r.begin(), r.end()) - r.begin());
    }
  }
  result.labels = FullLabeling(std::move(labels), c);
  return result;
}

}  // namespace mucca
