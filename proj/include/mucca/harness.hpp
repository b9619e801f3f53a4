#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mucca/baselines.hpp"
#include "mucca/game.hpp"
#include "mucca/graph.hpp"
#include "mucca/predictor.hpp"
#include "mucca/rng.hpp"
#include "mucca/spanning.hpp"

namespace mucca {

enum class Algorithm { Mucca, Wmv, LabProp, GtgEss };
enum class TreeMode { None, Mst, Rst };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Mucca: return "mucca";
    case Algorithm::Wmv: return "wmv";
    case Algorithm::LabProp: return "labprop";
    case Algorithm::GtgEss: return "gtg-ess";
  }
  return "?";
}

inline const char* to_string(TreeMode m) {
  switch (m) {
    case TreeMode::None: return "none";
    case TreeMode::Mst: return "mst";
    case TreeMode::Rst: return "rst";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& s) {
  if (s == "mucca") return Algorithm::Mucca;
  if (s == "wmv") return Algorithm::Wmv;
  if (s == "labprop") return Algorithm::LabProp;
  if (s == "gtg-ess" || s == "ess") return Algorithm::GtgEss;
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm '" + s + "'");
}

inline TreeMode parse_tree_mode(const std::string& s) {
  if (s == "none") return TreeMode::None;
  if (s == "mst") return TreeMode::Mst;
  if (s == "rst") return TreeMode::Rst;
  throw Error(ErrorCode::InvalidArgument, "unknown tree mode '" + s + "'");
}

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::Mucca;
  TreeMode tree = TreeMode::Mst;
  std::size_t committee = 1;
  std::vector<double> fractions{0.005, 0.01, 0.02, 0.05};
  std::size_t runs = 10;
  std::uint64_t master_seed = 1;

  /// Empty string when valid, else the problem.
  std::string validate() const {
    if (fractions.empty()) return "no training fractions";
    for (double f : fractions)
      if (!(f > 0.0 && f <= 1.0)) return "fraction " + std::to_string(f) + " outside (0,1]";
    if (committee < 1 || committee % 2 == 0) return "committee size must be odd and >= 1";
    if (runs < 1) return "runs must be >= 1";
    if (algorithm == Algorithm::Mucca && tree == TreeMode::None) return "mucca needs a tree mode";
    if (algorithm != Algorithm::Mucca && committee != 1) return "committees apply to mucca only";
    return {};
  }

  /// e.g. "11*mucca+rst", "mucca+mst", "wmv".
  std::string name() const {
    std::string s;
    if (committee > 1) s += std::to_string(committee) + "*";
    s += to_string(algorithm);
    if (algorithm == Algorithm::Mucca) s += std::string("+") + to_string(tree);
    return s;
  }
};

/// Number of training nodes drawn for a fraction of m labeled nodes.
inline std::size_t split_size(double fraction, std::size_t m) {
  // The slack absorbs products like 0.01 * 100 landing just above an integer.
  double raw = std::ceil(fraction * static_cast<double>(m) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, m);
}

/// Uniform sample without replacement of ceil(fraction * m) of the m labeled
/// nodes in `truth`; at least one.
inline PartialLabeling sample_split(const PartialLabeling& truth, double fraction,
                                    std::uint64_t seed) {
  auto labeled = truth.revealed_nodes();
  if (labeled.empty()) throw Error(ErrorCode::NoLabels, "ground truth has no labeled nodes");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "fraction must lie in (0,1]");
  }
  const std::size_t take = split_size(fraction, labeled.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < take; ++i) {
    std::size_t j = i + rng.below(labeled.size() - i);
    std::swap(labeled[i], labeled[j]);
  }
  PartialLabeling train(truth.size(), truth.class_count());
  for (std::size_t i = 0; i < take; ++i) train.reveal(labeled[i], truth[labeled[i]]);
  return train;
}

/// Nodes with a ground-truth label that are not in the training set.
inline std::vector<Node> test_nodes(const PartialLabeling& truth, const PartialLabeling& train) {
  std::vector<Node> out;
  for (Node u = 0; u < truth.size(); ++u)
    if (truth.is_revealed(u) && !train.is_revealed(u)) out.push_back(u);
  return out;
}

inline double error_rate(const FullLabeling& pred, const PartialLabeling& truth,
                         std::span<const Node> test_set) {
  if (test_set.empty()) throw Error(ErrorCode::EmptyTestSet, "no test nodes");
  std::size_t wrong = 0;
  for (Node u : test_set) {
    if (!truth.is_revealed(u)) {
      throw Error(ErrorCode::InvalidArgument, "test node " + std::to_string(u) + " has no truth");
    }
    if (pred[u] != truth[u]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(test_set.size());
}

inline SpanningTree build_tree(const WeightedGraph& g, TreeMode mode, std::uint64_t seed) {
  switch (mode) {
    case TreeMode::Mst: return max_similarity_spanning_tree(g);
    case TreeMode::Rst: return wilson_random_spanning_tree(g, seed);
    case TreeMode::None: break;
  }
  throw Error(ErrorCode::InvalidArgument, "no tree mode given");
}

/// Per-node plurality over member labelings, smallest class on ties.
inline FullLabeling majority_vote(std::span<const FullLabeling> members) {
  if (members.empty()) throw Error(ErrorCode::InvalidArgument, "empty committee");
  if (members.size() == 1) return members.front();
  const std::size_t n = members.front().size();
  const std::size_t c = members.front().class_count();
  std::vector<ClassId> labels(n);
  std::vector<std::uint32_t> votes(c);
  for (Node u = 0; u < n; ++u) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const FullLabeling& m : members) ++votes[m[u]];
    labels[u] = static_cast<ClassId>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return FullLabeling(std::move(labels), c);
}

/// One MUCCA predictor per seed, each on its own spanning tree, combined by
/// per-node majority.
inline FullLabeling committee_predict(const WeightedGraph& g, const PartialLabeling& y,
                                      std::size_t size, std::span<const std::uint64_t> seeds,
                                      TreeMode mode = TreeMode::Rst) {
  if (seeds.size() < size) throw Error(ErrorCode::InvalidArgument, "fewer seeds than members");
  std::vector<FullLabeling> members;
  members.reserve(size);
  for (std::size_t m = 0; m < size; ++m) members.push_back(predict(build_tree(g, mode, seeds[m]), y));
  return majority_vote(members);
}

/// Runs one configured predictor. Seeds for committee members derive from
/// `seed`.
inline FullLabeling run_predictor(const ExperimentConfig& cfg, const WeightedGraph& g,
                                  const PartialLabeling& train, std::uint64_t seed) {
  switch (cfg.algorithm) {
    case Algorithm::Mucca: {
      std::vector<std::uint64_t> seeds(cfg.committee);
      for (std::size_t m = 0; m < cfg.committee; ++m) seeds[m] = derive_seed(seed, {m});
      return committee_predict(g, train, cfg.committee, seeds, cfg.tree);
    }
    case Algorithm::Wmv: return wmv_predict(g, train);
    case Algorithm::LabProp: return label_propagation(g, train).labels;
    case Algorithm::GtgEss: {
      GameInstance game(g, train);
      return gtg_ess_solve(game, uniform_profile(game)).labels;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown algorithm");
}

struct RunRecord {
  std::string algorithm;
  TreeMode tree;
  std::size_t committee;
  double fraction;
  std::size_t run;
  std::uint64_t seed;
  double error;
  double seconds;
};

struct CellSummary {
  std::string algorithm;
  double fraction;
  double mean_error;
  double stddev_error;
  double mean_seconds;
  std::vector<std::uint64_t> seeds;
};

struct ResultTable {
  std::vector<RunRecord> runs;
  std::vector<CellSummary> cells;

  const CellSummary& cell(const std::string& algorithm, double fraction) const {
    for (const CellSummary& c : cells)
      if (c.algorithm == algorithm && c.fraction == fraction) return c;
    throw Error(ErrorCode::InvalidArgument, "no cell " + algorithm + " @ " + std::to_string(fraction));
  }
};

/// Seed of run `run` at fraction index `fraction_index`. Shared across
/// predictors so they see the same splits.
inline std::uint64_t run_seed(std::uint64_t master, std::size_t fraction_index, std::size_t run) {
  return derive_seed(master, {fraction_index, run});
}

namespace detail {

inline std::vector<CellSummary> summarize(const std::vector<RunRecord>& runs) {
  std::vector<CellSummary> cells;
  std::map<std::pair<std::string, double>, std::size_t> index;
  for (const RunRecord& r : runs) {
    auto key = std::pair(r.algorithm, r.fraction);
    auto [it, fresh] = index.try_emplace(key, cells.size());
    if (fresh) cells.push_back({r.algorithm, r.fraction, 0.0, 0.0, 0.0, {}});
    CellSummary& c = cells[it->second];
    c.mean_error += r.error;
    c.mean_seconds += r.seconds;
    c.seeds.push_back(r.seed);
  }
  for (CellSummary& c : cells) {
    const double k = static_cast<double>(c.seeds.size());
    c.mean_error /= k;
    c.mean_seconds /= k;
    double ss = 0.0;
    for (const RunRecord& r : runs)
      if (r.algorithm == c.algorithm && r.fraction == c.fraction)
        ss += (r.error - c.mean_error) * (r.error - c.mean_error);
    c.stddev_error = c.seeds.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
  }
  return cells;
}

}  // namespace detail

/// Every (fraction, run) cell of one configuration. Training splits are
/// resampled each run from the labeled nodes of `truth`; the error is
/// measured on the labeled nodes left out. Timing covers tree construction
/// and prediction.
inline ResultTable run_experiment(const ExperimentConfig& cfg, const WeightedGraph& g,
                                  const PartialLabeling& truth) {
  if (auto problem = cfg.validate(); !problem.empty()) {
    throw Error(ErrorCode::InvalidArgument, "experiment config: " + problem);
  }
  if (truth.size() != g.node_count()) {
    throw Error(ErrorCode::InvalidArgument, "labels do not match graph size");
  }
  ResultTable table;
  const std::string name = cfg.name();
  for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
    for (std::size_t run = 0; run < cfg.runs; ++run) {
      const std::uint64_t seed = run_seed(cfg.master_seed, fi, run);
      PartialLabeling train = sample_split(truth, cfg.fractions[fi], seed);
      auto test = test_nodes(truth, train);
      auto start = std::chrono::steady_clock::now();
      FullLabeling pred = run_predictor(cfg, g, train, derive_seed(seed, {0xC0}));
      double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      double err = error_rate(pred, truth, test);
      table.runs.push_back({name, cfg.tree, cfg.committee, cfg.fractions[fi], run, seed, err, seconds});
    }
  }
  table.cells = detail::summarize(table.runs);
  return table;
}

inline void append(ResultTable& into, const ResultTable& from) {
  into.runs.insert(into.runs.end(), from.runs.begin(), from.runs.end());
  into.cells = detail::summarize(into.runs);
}

inline void write_csv_header(std::ostream& out) {
  out << "algorithm,tree_mode,committee,fraction,run,seed,error,seconds\n";
}

inline void write_csv(std::ostream& out, const ResultTable& table, bool header = true) {
  if (header) write_csv_header(out);
  for (const RunRecord& r : table.runs) {
    out << r.algorithm << ',' << to_string(r.tree) << ',' << r.committee << ',' << r.fraction << ','
        << r.run << ',' << r.seed << ',' << r.error << ',' << r.seconds << '\n';
  }
}

/// A batch of configurations sharing fractions, runs and seed, plus optional
/// input paths.
struct ExperimentPlan {
  std::vector<ExperimentConfig> configs;
  std::string graph_path;
  std::string labels_path;
};

/// Reads `key = value` lines (`#` comments). Keys:
///   predictors = mucca:mst:1, mucca:rst:11, wmv, labprop, gtg-ess
///   fractions  = 0.005, 0.01, 0.02, 0.05
///   runs       = 10
///   seed       = 42
///   graph      = path/to/edges.txt
///   labels     = path/to/labels.txt
inline ExperimentPlan parse_experiment_config(std::istream& in) {
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto split = [&](const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  ExperimentConfig base;
  std::vector<std::string> predictors{"mucca:mst:1"};
  ExperimentPlan plan;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::MalformedLine, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    try {
      if (key == "predictors") {
        predictors = split(value, ',');
      } else if (key == "fractions") {
        base.fractions.clear();
        for (const auto& f : split(value, ',')) base.fractions.push_back(std::stod(f));
      } else if (key == "runs") {
        base.runs = std::stoul(value);
      } else if (key == "seed") {
        base.master_seed = std::stoull(value);
      } else if (key == "graph") {
        plan.graph_path = value;
      } else if (key == "labels") {
        plan.labels_path = value;
      } else {
        throw Error(ErrorCode::MalformedLine, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::MalformedLine, "config line " + std::to_string(line_no) + ": bad value '" + value + "'");
    }
  }
  for (const std::string& p : predictors) {
    auto parts = split(p, ':');
    ExperimentConfig cfg = base;
    cfg.algorithm = parse_algorithm(parts.at(0));
    if (cfg.algorithm == Algorithm::Mucca) {
      cfg.tree = parts.size() > 1 ? parse_tree_mode(parts[1]) : TreeMode::Mst;
      try {
        cfg.committee = parts.size() > 2 ? std::stoul(parts[2]) : 1;
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::MalformedLine, "predictor '" + p + "': bad committee size");
      }
    } else {
      cfg.tree = TreeMode::None;
      cfg.committee = 1;
    }
    if (auto problem = cfg.validate(); !problem.empty()) {
      throw Error(ErrorCode::InvalidArgument, "predictor '" + p + "': " + problem);
    }
    plan.configs.push_back(cfg);
  }
  return plan;
}

}  // namespace mucca
