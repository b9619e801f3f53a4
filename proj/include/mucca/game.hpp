#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mucca/graph.hpp"

namespace mucca {

/// Graph Transduction Game: nodes are players, classes are strategies, and a
/// player's payoff is the weight of the edges to neighbors sharing its class.
/// Revealed nodes are determined players whose strategy is fixed.
class GameInstance {
 public:
  // Holds references; temporaries would dangle.
  GameInstance(WeightedGraph&&, const PartialLabeling&) = delete;
  GameInstance(const WeightedGraph&, PartialLabeling&&) = delete;
  GameInstance(const WeightedGraph& graph, const PartialLabeling& training)
      : graph_(&graph), training_(&training) {
    if (training.size() != graph.node_count()) {
      throw Error(ErrorCode::InvalidArgument, "labeling size does not match graph");
    }
    if (training.class_count() < 2) {
      throw Error(ErrorCode::InvalidArgument, "a game needs at least two classes");
    }
  }

  const WeightedGraph& graph() const noexcept { return *graph_; }
  const PartialLabeling& training() const noexcept { return *training_; }
  std::size_t node_count() const noexcept { return graph_->node_count(); }
  std::size_t class_count() const noexcept { return training_->class_count(); }
  bool is_determined(Node i) const { return training_->is_revealed(i); }

  std::vector<Node> undetermined() const {
    std::vector<Node> out;
    for (Node i = 0; i < node_count(); ++i)
      if (!is_determined(i)) out.push_back(i);
    return out;
  }

 private:
  const WeightedGraph* graph_;
  const PartialLabeling* training_;
};

/// Row-stochastic n x c matrix of mixed strategies, row-major.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  StrategyProfile(std::size_t n, std::size_t c) : n_(n), c_(c), x_(n * c, 0.0) {}

  std::size_t node_count() const noexcept { return n_; }
  std::size_t class_count() const noexcept { return c_; }

  std::span<double> row(Node i) { return std::span<double>(x_).subspan(std::size_t{i} * c_, c_); }
  std::span<const double> row(Node i) const {
    return std::span<const double>(x_).subspan(std::size_t{i} * c_, c_);
  }
  double operator()(Node i, ClassId k) const { return x_[std::size_t{i} * c_ + k]; }
  double& operator()(Node i, ClassId k) { return x_[std::size_t{i} * c_ + k]; }

  void set_pure(Node i, ClassId k) {
    auto r = row(i);
    std::fill(r.begin(), r.end(), 0.0);
    r[k] = 1.0;
  }

  static StrategyProfile pure(const FullLabeling& s) {
    StrategyProfile x(s.size(), s.class_count());
    for (Node i = 0; i < s.size(); ++i) x.set_pure(i, s[i]);
    return x;
  }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t c_ = 0;
  std::vector<double> x_;
};

/// Empty string when `x` is row-stochastic within 1e-9 and determined
/// players are one-hot at their revealed class; else the first violation.
inline std::string validate_profile(const GameInstance& game, const StrategyProfile& x) {
  if (x.node_count() != game.node_count() || x.class_count() != game.class_count()) {
    return "shape mismatch";
  }
  for (Node i = 0; i < x.node_count(); ++i) {
    double sum = 0.0;
    for (double p : x.row(i)) {
      if (!(p >= 0.0)) return "row " + std::to_string(i) + " has a negative entry";
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) return "row " + std::to_string(i) + " does not sum to 1";
    if (game.is_determined(i) && x(i, game.training()[i]) != 1.0) {
      return "determined row " + std::to_string(i) + " is not one-hot at its class";
    }
  }
  return {};
}

/// Uniform rows for undetermined players, one-hot rows for determined ones.
inline StrategyProfile uniform_profile(const GameInstance& game) {
  const std::size_t c = game.class_count();
  StrategyProfile x(game.node_count(), c);
  for (Node i = 0; i < game.node_count(); ++i) {
    if (game.is_determined(i)) {
      x.set_pure(i, game.training()[i]);
    } else {
      for (double& p : x.row(i)) p = 1.0 / static_cast<double>(c);
    }
  }
  return x;
}

/// Weight of i's edges to neighbors with the same label under s.
inline double payoff_pure(const GameInstance& game, const FullLabeling& s, Node i) {
  double sum = 0.0;
  for (const Neighbor& nb : game.graph().neighbors(i))
    if (s[nb.node] == s[i]) sum += nb.weight;
  return sum;
}

/// Payoff of each pure strategy for player i against labeling s:
/// result[k] = sum of weights to neighbors labeled k.
inline std::vector<double> pure_payoffs(const GameInstance& game, const FullLabeling& s, Node i) {
  std::vector<double> out(game.class_count(), 0.0);
  for (const Neighbor& nb : game.graph().neighbors(i)) out[s[nb.node]] += nb.weight;
  return out;
}

/// u_i(e_h) for every h: the payoff of pure strategy h against profile x.
inline void strategy_payoffs(const GameInstance& game, const StrategyProfile& x, Node i,
                             std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (const Neighbor& nb : game.graph().neighbors(i)) {
    auto xj = x.row(nb.node);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += nb.weight * xj[k];
  }
}

/// Expected agreement u_i(x) = sum_j w_ij <x_i, x_j>.
inline double utility_mixed(const GameInstance& game, const StrategyProfile& x, Node i) {
  double sum = 0.0;
  auto xi = x.row(i);
  for (const Neighbor& nb : game.graph().neighbors(i)) {
    auto xj = x.row(nb.node);
    double dot = 0.0;
    for (std::size_t k = 0; k < xi.size(); ++k) dot += xi[k] * xj[k];
    sum += nb.weight * dot;
  }
  return sum;
}

/// Total agreement over edges, each edge counted once. Replicator steps never
/// decrease it.
inline double potential(const GameInstance& game, const StrategyProfile& x) {
  double sum = 0.0;
  for (const Edge& e : game.graph().edges()) {
    auto xu = x.row(e.u), xv = x.row(e.v);
    double dot = 0.0;
    for (std::size_t k = 0; k < xu.size(); ++k) dot += xu[k] * xv[k];
    sum += e.w * dot;
  }
  return sum;
}

struct Deviation {
  Node player;
  ClassId better_class;
  double gain;
};

struct NashCheck {
  bool is_nash = true;
  std::optional<Deviation> witness;

  explicit operator bool() const noexcept { return is_nash; }
};

/// Checks that no undetermined player can strictly raise its payoff by
/// switching class. Comparisons are exact. On failure the witness is the
/// lowest-id deviating player with its best alternative.
inline NashCheck is_pure_nash(const GameInstance& game, const FullLabeling& s) {
  if (s.size() != game.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "labeling size does not match graph");
  }
  const PartialLabeling& y = game.training();
  for (Node i = 0; i < s.size(); ++i) {
    if (y.is_revealed(i) && y[i] != s[i]) {
      throw Error(ErrorCode::InconsistentWithTraining,
                  "node " + std::to_string(i) + " relabeled from its training class");
    }
  }
  std::vector<double> pay(game.class_count());
  for (Node i = 0; i < s.size(); ++i) {
    if (y.is_revealed(i)) continue;
    std::fill(pay.begin(), pay.end(), 0.0);
    for (const Neighbor& nb : game.graph().neighbors(i)) pay[s[nb.node]] += nb.weight;
    ClassId best = static_cast<ClassId>(std::max_element(pay.begin(), pay.end()) - pay.begin());
    if (pay[best] > pay[s[i]]) {
      return NashCheck{false, Deviation{i, best, pay[best] - pay[s[i]]}};
    }
  }
  return {};
}

/// Every pure Nash equilibrium by exhaustive search, in lexicographic order
/// of the labeling vector. Refuses games with more than `limit` profiles.
inline std::vector<FullLabeling> enumerate_pure_nash(const GameInstance& game,
                                                     std::size_t limit = 1'000'000) {
  const auto free = game.undetermined();
  const std::size_t c = game.class_count();
  std::size_t total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (total > limit / c) {
      throw Error(ErrorCode::TooLarge, std::to_string(c) + "^" + std::to_string(free.size()) +
                                           " profiles exceed " + std::to_string(limit));
    }
    total *= c;
  }

  const PartialLabeling& y = game.training();
  std::vector<ClassId> labels(game.node_count(), 0);
  for (Node i = 0; i < labels.size(); ++i)
    if (y.is_revealed(i)) labels[i] = y[i];

  std::vector<FullLabeling> out;
  std::vector<double> pay(c);
  for (;;) {
    bool stable = true;
    for (Node i : free) {
      std::fill(pay.begin(), pay.end(), 0.0);
      for (const Neighbor& nb : game.graph().neighbors(i)) pay[labels[nb.node]] += nb.weight;
      if (*std::max_element(pay.begin(), pay.end()) > pay[labels[i]]) {
        stable = false;
        break;
      }
    }
    if (stable) out.emplace_back(labels, c);
    // Odometer over the free players, last node fastest.
    std::size_t pos = free.size();
    while (pos > 0) {
      Node i = free[pos - 1];
      if (++labels[i] < c) break;
      labels[i] = 0;
      --pos;
    }
    if (pos == 0) break;
  }
  return out;
}

struct ReplicatorOptions {
  // When set, undetermined players with zero utility keep their row instead
  // of raising ZeroUtility.
  const std::vector<char>* frozen = nullptr;
};

/// One synchronous discrete replicator update:
/// x_ih <- x_ih * u_i(e_h) / u_i(x). Determined rows are copied unchanged.
inline StrategyProfile replicator_step(const GameInstance& game, const StrategyProfile& x,
                                       const ReplicatorOptions& options = {}) {
  StrategyProfile next = x;
  std::vector<double> pay(game.class_count());
  for (Node i = 0; i < game.node_count(); ++i) {
    if (game.is_determined(i)) continue;
    if (options.frozen && (*options.frozen)[i]) continue;
    strategy_payoffs(game, x, i, pay);
    auto xi = x.row(i);
    double u = 0.0;
    for (std::size_t k = 0; k < pay.size(); ++k) u += xi[k] * pay[k];
    if (!(u > 0.0)) {
      throw Error(ErrorCode::ZeroUtility, "player " + std::to_string(i) + " has zero utility");
    }
    auto out = next.row(i);
    for (std::size_t k = 0; k < pay.size(); ++k) out[k] = xi[k] * pay[k] / u;
  }
  return next;
}

struct ConvergenceRecord {
  std::size_t iteration;
  double potential;
  double max_delta;
};

struct EssResult {
  StrategyProfile profile;
  FullLabeling labels;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<ConvergenceRecord> log;
};

struct EssOptions {
  double tol = 1e-6;
  // 0 selects 10 * node count.
  std::size_t max_iters = 0;
  bool record_log = false;
};

/// Replicator dynamics from `init` until the largest entry change in a step
/// drops below tol or max_iters steps ran. Players whose utility is zero at
/// any point are frozen and decoded to the training plurality class; the
/// rest decode by argmax, smallest class on ties.
inline EssResult gtg_ess_solve(const GameInstance& game, StrategyProfile init,
                               const EssOptions& options = {}) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (auto problem = validate_profile(game, init); !problem.empty()) {
    throw Error(ErrorCode::InvalidArgument, "initial profile: " + problem);
  }
  const std::size_t n = game.node_count();
  const std::size_t c = game.class_count();
  const std::size_t max_iters = options.max_iters ? options.max_iters : 10 * n;

  std::vector<char> frozen(n, 0);
  std::vector<double> pay(c);
  auto freeze_zero_utility = [&](const StrategyProfile& x) {
    for (Node i = 0; i < n; ++i) {
      if (game.is_determined(i) || frozen[i]) continue;
      if (!(utility_mixed(game, x, i) > 0.0)) frozen[i] = 1;
    }
  };

  EssResult result;
  result.profile = std::move(init);
  ReplicatorOptions step_options{&frozen};
  for (std::size_t it = 1; it <= max_iters; ++it) {
    freeze_zero_utility(result.profile);
    StrategyProfile next = replicator_step(game, result.profile, step_options);
    double delta = 0.0;
    for (Node i = 0; i < n; ++i) {
      auto a = result.profile.row(i), b = next.row(i);
      for (std::size_t k = 0; k < c; ++k) delta = std::max(delta, std::abs(a[k] - b[k]));
    }
    result.profile = std::move(next);
    result.iterations = it;
    if (options.record_log) result.log.push_back({it, potential(game, result.profile), delta});
    if (delta < options.tol) {
      result.converged = true;
      break;
    }
  }

  const PartialLabeling& y = game.training();
  const ClassId fallback = y.revealed_count() ? y.plurality_class() : 0;
  std::vector<ClassId> labels(n);
  for (Node i = 0; i < n; ++i) {
    if (y.is_revealed(i)) {
      labels[i] = y[i];
    } else if (frozen[i]) {
      labels[i] = fallback;
    } else {
      auto r = result.profile.row(i);
      labels[i] = static_cast<ClassId>(std::max_element(r.begin(), r.end()) - r.begin());
    }
  }
  result.labels = FullLabeling(std::move(labels), c);
  return result;
}

}  // namespace mucca
