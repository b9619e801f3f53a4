#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "mucca/mucca.hpp"

namespace {

using namespace mucca;

// "-" selects stdin / stdout.
class Input {
 public:
  explicit Input(const std::string& path) {
    if (path != "-") file_ = std::make_unique<std::ifstream>(io::open_input(path));
  }
  std::istream& get() { return file_ ? *file_ : std::cin; }

 private:
  std::unique_ptr<std::ifstream> file_;
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") file_ = std::make_unique<std::ofstream>(io::open_output(path));
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

WeightedGraph load_graph(const std::string& path) {
  Input in(path);
  return io::read_edge_list(in.get());
}

PartialLabeling load_labels(const std::string& path, std::size_t n) {
  Input in(path);
  return io::read_labels(in.get(), n);
}

struct GraphIo {
  std::string graph = "-";
  std::string out = "-";
};

void add_graph_io(CLI::App* cmd, GraphIo& io) {
  cmd->add_option("--graph", io.graph, "Edge list `u v w` per line (- for stdin)");
  cmd->add_option("--out", io.out, "Output file (- for stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transductive node classification on weighted graphs"};
  app.require_subcommand(1);

  // spanning
  GraphIo span_io;
  std::string span_mode = "mst";
  std::uint64_t span_seed = 1;
  auto* span = app.add_subcommand("spanning", "Extract a spanning tree as an edge list");
  add_graph_io(span, span_io);
  span->add_option("--mode", span_mode, "mst or rst")->check(CLI::IsMember({"mst", "rst"}));
  span->add_option("--seed", span_seed, "Seed for rst");
  span->callback([&] {
    WeightedGraph g = load_graph(span_io.graph);
    SpanningTree t = build_tree(g, parse_tree_mode(span_mode), span_seed);
    Output out(span_io.out);
    for (Node u = 0; u < t.node_count(); ++u) {
      if (!t.is_root(u)) {
        const Edge& e = g.edge(t.original_edge_id[u]);
        out.get() << e.u << ' ' << e.v << ' ' << io::detail::format_double(e.w) << '\n';
      }
    }
  });

  // predict
  GraphIo pred_io;
  std::string pred_tree = "mst", pred_labels;
  std::uint64_t pred_seed = 1;
  std::size_t pred_committee = 1;
  auto* pred = app.add_subcommand("predict", "Label every node with the tree predictor");
  add_graph_io(pred, pred_io);
  pred->add_option("--tree", pred_tree, "mst or rst")->check(CLI::IsMember({"mst", "rst"}));
  pred->add_option("--seed", pred_seed, "Seed for rst");
  pred->add_option("--labels", pred_labels, "Training labels `node class` per line")->required();
  pred->add_option("--committee", pred_committee, "Odd number of trees voting per node");
  pred->callback([&] {
    WeightedGraph g = load_graph(pred_io.graph);
    PartialLabeling y = load_labels(pred_labels, g.node_count());
    ExperimentConfig cfg;
    cfg.algorithm = Algorithm::Mucca;
    cfg.tree = parse_tree_mode(pred_tree);
    cfg.committee = pred_committee;
    if (auto problem = cfg.validate(); !problem.empty()) throw CLI::ValidationError(problem);
    FullLabeling s = run_predictor(cfg, g, y, pred_seed);
    Output out(pred_io.out);
    io::write_labels(out.get(), s);
  });

  // solve-ess
  GraphIo ess_io;
  std::string ess_labels, ess_log;
  EssOptions ess_options;
  ess_options.record_log = true;
  auto* ess = app.add_subcommand("solve-ess", "Replicator dynamics on the full graph");
  add_graph_io(ess, ess_io);
  ess->add_option("--labels", ess_labels, "Training labels")->required();
  ess->add_option("--tol", ess_options.tol, "Stop when no entry moves by this much");
  ess->add_option("--max-iters", ess_options.max_iters, "Iteration cap (0: 10 x nodes)");
  ess->add_option("--log", ess_log, "Convergence CSV: iteration,potential,max_delta");
  ess->callback([&] {
    WeightedGraph g = load_graph(ess_io.graph);
    PartialLabeling y = load_labels(ess_labels, g.node_count());
    GameInstance game(g, y);
    EssResult r = gtg_ess_solve(game, uniform_profile(game), ess_options);
    Output out(ess_io.out);
    io::write_labels(out.get(), r.labels);
    if (!ess_log.empty()) {
      Output log(ess_log);
      log.get() << "iteration,potential,max_delta\n" << std::setprecision(17);
      for (const auto& rec : r.log)
        log.get() << rec.iteration << ',' << rec.potential << ',' << rec.max_delta << '\n';
    }
    std::cerr << (r.converged ? "converged" : "stopped") << " after " << r.iterations
              << " iterations\n";
  });

  // baseline
  GraphIo base_io;
  std::string base_algo = "wmv", base_labels;
  auto* base = app.add_subcommand("baseline", "Weighted majority vote or label propagation");
  add_graph_io(base, base_io);
  base->add_option("--algo", base_algo, "wmv or labprop")->check(CLI::IsMember({"wmv", "labprop"}));
  base->add_option("--labels", base_labels, "Training labels")->required();
  base->callback([&] {
    WeightedGraph g = load_graph(base_io.graph);
    PartialLabeling y = load_labels(base_labels, g.node_count());
    FullLabeling s = base_algo == "wmv" ? wmv_predict(g, y) : label_propagation(g, y).labels;
    Output out(base_io.out);
    io::write_labels(out.get(), s);
  });

  // build-graph
  std::size_t knn_k = 10;
  std::string knn_features, knn_graph_out = "-", knn_labels_out;
  auto* build = app.add_subcommand("build-graph", "k-NN similarity graph from a feature CSV");
  build->add_option("--k", knn_k, "Neighbors per row before symmetrization");
  build->add_option("--features", knn_features, "CSV of features, optional `label` column")->required();
  build->add_option("--out-graph", knn_graph_out, "Edge list output");
  build->add_option("--out-labels", knn_labels_out, "Labels of labeled rows");
  build->callback([&] {
    FeatureMatrix feats = load_features(knn_features);
    WeightedGraph g = knn_graph(feats, knn_k);
    Output out(knn_graph_out);
    io::write_edge_list(out.get(), g);
    if (!knn_labels_out.empty()) {
      Output labels(knn_labels_out);
      if (feats.has_labels()) io::write_labels(labels.get(), feats.label_set());
    }
  });

  // experiment
  std::string exp_config, exp_out = "-", exp_graph, exp_labels;
  auto* exp = app.add_subcommand("experiment", "Error-rate grid over training fractions");
  exp->add_option("--config", exp_config, "key = value experiment description")->required();
  exp->add_option("--out", exp_out, "Per-run CSV");
  exp->add_option("--graph", exp_graph, "Overrides the config's graph");
  exp->add_option("--labels", exp_labels, "Overrides the config's ground-truth labels");
  exp->callback([&] {
    Input cfg_in(exp_config);
    ExperimentPlan plan = parse_experiment_config(cfg_in.get());
    if (!exp_graph.empty()) plan.graph_path = exp_graph;
    if (!exp_labels.empty()) plan.labels_path = exp_labels;
    if (plan.graph_path.empty() || plan.labels_path.empty()) {
      throw CLI::ValidationError("experiment needs a graph and ground-truth labels");
    }
    WeightedGraph g = load_graph(plan.graph_path);
    PartialLabeling truth = load_labels(plan.labels_path, g.node_count());
    ResultTable all;
    for (const ExperimentConfig& cfg : plan.configs) append(all, run_experiment(cfg, g, truth));
    Output out(exp_out);
    write_csv(out.get(), all);
    std::cerr << std::left << std::setw(18) << "algorithm" << std::setw(10) << "fraction"
              << std::setw(12) << "error%" << std::setw(10) << "std%" << "seconds\n";
    for (const CellSummary& c : all.cells) {
      std::cerr << std::left << std::setw(18) << c.algorithm << std::setw(10) << c.fraction
                << std::setw(12) << 100.0 * c.mean_error << std::setw(10)
                << 100.0 * c.stddev_error << c.mean_seconds << '\n';
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const mucca::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
