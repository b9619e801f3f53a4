#include <gtest/gtest.h>

#include "mucca/game.hpp"
#include "mucca/predictor.hpp"
#include "oracles.hpp"

using namespace mucca;

namespace {

PartialLabeling reveal(std::size_t n, std::size_t c, std::initializer_list<std::pair<Node, ClassId>> known) {
  PartialLabeling y(n, c);
  for (auto [u, k] : known) y.reveal(u, k);
  return y;
}

std::vector<ClassId> labels_of(const FullLabeling& s) { return {s.labels().begin(), s.labels().end()}; }

double cut_weight(const WeightedGraph& g, const std::vector<ClassId>& s) {
  double w = 0.0;
  for (const Edge& e : g.edges())
    if (s[e.u] != s[e.v]) w += e.w;
  return w;
}

// Labelings over the free nodes of a small instance with minimum cut weight.
std::vector<std::vector<ClassId>> min_cut_labelings(const WeightedGraph& g, const PartialLabeling& y) {
  std::vector<Node> free;
  for (Node u = 0; u < g.node_count(); ++u)
    if (!y.is_revealed(u)) free.push_back(u);
  std::vector<std::vector<ClassId>> best;
  double best_cut = 1e300;
  std::size_t total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) total *= y.class_count();
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<ClassId> s(g.node_count());
    std::size_t rest = code;
    for (Node u = 0; u < g.node_count(); ++u) s[u] = y.is_revealed(u) ? y[u] : 0;
    for (Node u : free) {
      s[u] = static_cast<ClassId>(rest % y.class_count());
      rest /= y.class_count();
    }
    double w = cut_weight(g, s);
    if (w < best_cut - 1e-12) {
      best_cut = w;
      best.clear();
    }
    if (std::abs(w - best_cut) <= 1e-12) best.push_back(s);
  }
  return best;
}

}  // namespace

// Fork 0 with three arms: class 0 at epsilon 3, class 1 at epsilon 2 twice.
TEST(LabelForks, DistinctEpsilonEdgesSumPerClass) {
  auto t = from_edge_list({{0, 1, 5.0}, {1, 2, 3.0}, {0, 3, 4.0}, {3, 4, 2.0}, {0, 5, 6.0}, {5, 6, 2.0}});
  auto y = reveal(7, 2, {{2, 0}, {4, 1}, {6, 1}});
  auto d = decompose(t, y);
  ASSERT_EQ(d.forks, (std::vector<Node>{0}));
  EXPECT_EQ(fork_scores(t, y, d, 0), (std::vector<double>{3.0, 4.0}));
  EXPECT_EQ(label_forks(t, y, d), (std::vector<ClassId>{1}));
}

TEST(LabelForks, SingleCategoryWins) {
  auto t = from_edge_list({{0, 1, 0.1}, {0, 2, 9.0}, {0, 3, 4.0}});
  auto y = reveal(4, 3, {{1, 0}, {2, 0}, {3, 0}});
  auto d = decompose(t, y);
  EXPECT_EQ(label_forks(t, y, d), (std::vector<ClassId>{0}));
}

// Two class-1 paths share the epsilon-edge {0,2} of weight 5; it counts once.
TEST(LabelForks, SharedEpsilonEdgeCountsOnce) {
  auto t = from_edge_list({{0, 1, 4.0}, {0, 2, 5.0}, {2, 3, 9.0}, {2, 4, 8.0}, {0, 5, 0.5}});
  auto y = reveal(6, 3, {{1, 0}, {3, 1}, {4, 1}, {5, 2}});
  auto d = decompose(t, y);
  ASSERT_EQ(d.forks, (std::vector<Node>{0, 2}));
  EXPECT_EQ(fork_scores(t, y, d, 0), (std::vector<double>{4.0, 5.0, 0.5}));
  EXPECT_EQ(label_forks(t, y, d)[0], 1u);
}

// Equal-weight edges on one path: the one nearest the fork is the
// epsilon-edge, so both class-1 paths share it.
TEST(LabelForks, PathTieUsesEdgeNearestFork) {
  auto t = from_edge_list({{0, 1, 2.0}, {1, 2, 2.0}, {1, 3, 2.0}, {0, 4, 3.0}, {0, 5, 0.5}});
  auto y = reveal(6, 3, {{2, 1}, {3, 1}, {4, 0}, {5, 2}});
  auto d = decompose(t, y);
  ASSERT_EQ(d.forks, (std::vector<Node>{0, 1}));
  EXPECT_EQ(fork_scores(t, y, d, 0), (std::vector<double>{3.0, 2.0, 0.5}));
}

TEST(LabelForks, ScoreTieGoesToSmallestClass) {
  auto t = from_edge_list({{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}});
  auto y = reveal(5, 3, {{1, 2}, {2, 1}, {3, 1}, {4, 2}});
  auto d = decompose(t, y);
  EXPECT_EQ(label_forks(t, y, d), (std::vector<ClassId>{1}));
}

// Adjacent forks labeled independently can disagree so that fork 0 gains
// by switching; settling them restores the equilibrium.
TEST(SettleForks, RepairsCoupledForks) {
  auto t = from_edge_list({{5, 0, 2.0}, {0, 2, 2.0}, {5, 3, 2.0}, {3, 1, 1.0}, {0, 4, 3.0}, {5, 6, 1.0}});
  auto y = reveal(7, 2, {{1, 0}, {2, 0}, {4, 1}, {6, 1}});
  auto d = decompose(t, y);
  ASSERT_EQ(d.forks, (std::vector<Node>{0, 5}));
  auto forks = label_forks(t, y, d);
  EXPECT_EQ(forks, (std::vector<ClassId>{1, 0}));
  GameInstance game(t, y);
  auto raw = predict_on_tree(t, y, {.settle_forks = false});
  auto check = is_pure_nash(game, raw);
  ASSERT_FALSE(check.is_nash);
  EXPECT_EQ(check.witness->player, 0u);

  // Either fork could move; the worklist reaches fork 5 first.
  EXPECT_EQ(settle_forks(t, y, d, forks), 1u);
  EXPECT_EQ(forks, (std::vector<ClassId>{1, 1}));
  EXPECT_TRUE(is_pure_nash(game, predict_on_tree(t, y)));
}

TEST(SettleForks, NoMovesWhenForksAlreadyStable) {
  auto t = from_edge_list({{0, 1, 5.0}, {1, 2, 3.0}, {0, 3, 4.0}, {3, 4, 2.0}, {0, 5, 6.0}, {5, 6, 2.0}});
  auto y = reveal(7, 2, {{2, 0}, {4, 1}, {6, 1}});
  auto d = decompose(t, y);
  auto forks = label_forks(t, y, d);
  EXPECT_EQ(settle_forks(t, y, d, forks), 0u);
}

TEST(CutHingeLines, SplitsAtUniqueMinimumEdge) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 2.0}});
  auto y = reveal(4, 2, {{0, 0}, {3, 1}});
  auto d = decompose(t, y);
  auto out = cut_hinge_lines(t, y, d, {});
  EXPECT_EQ(out, (std::vector<ClassId>{0, 0, 1, 1}));
  // Oracle: the unique minimum-cut completion.
  EXPECT_EQ(min_cut_labelings(t, y), (std::vector<std::vector<ClassId>>{{0, 0, 1, 1}}));
}

TEST(CutHingeLines, EqualEndpointsLabelWholeLine) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 2.0}});
  auto y = reveal(4, 2, {{0, 1}, {3, 1}});
  auto d = decompose(t, y);
  EXPECT_EQ(cut_hinge_lines(t, y, d, {}), (std::vector<ClassId>{1, 1, 1, 1}));
}

TEST(CutHingeLines, UnitLineSplitsByNearestEndpoint) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  auto y = reveal(4, 2, {{0, 0}, {3, 1}});
  auto d = decompose(t, y);
  EXPECT_EQ(cut_hinge_lines(t, y, d, {}), (std::vector<ClassId>{0, 0, 1, 1}));
  // All three completions with a single cut are minimum cuts.
  EXPECT_EQ(min_cut_labelings(t, y).size(), 3u);
}

// Tied minimum edges away from the resistance midpoint: the cut stays on a
// minimum edge. Nearest endpoints would split a|b across the heavy middle
// edge; the tied edges at positions 0 and 2 are equally far from that split,
// so the one nearer the start wins.
TEST(CutHingeLines, TiedMinimumsKeepCutOnMinimumEdge) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 5.0}, {2, 3, 1.0}});
  auto y = reveal(4, 2, {{0, 0}, {3, 1}});
  auto d = decompose(t, y);
  EXPECT_EQ(cut_hinge_lines(t, y, d, {}), (std::vector<ClassId>{0, 1, 1, 1}));
}

TEST(CutHingeLines, LongUnitLineSplitsInTheMiddle) {
  std::vector<Edge> edges;
  for (Node i = 0; i < 6; ++i) edges.push_back({i, i + 1, 1.0});
  auto t = from_edge_list(edges);
  auto y = reveal(7, 2, {{0, 0}, {6, 1}});
  auto d = decompose(t, y);
  // Node 3 is equidistant and goes to the start.
  EXPECT_EQ(cut_hinge_lines(t, y, d, {}), (std::vector<ClassId>{0, 0, 0, 0, 1, 1, 1}));
}

TEST(CutHingeLines, MissingForkLabelIsAnError) {
  auto t = from_edge_list({{0, 1, 1.0}, {0, 2, 2.0}, {0, 3, 3.0}});
  auto y = reveal(4, 2, {{1, 0}, {2, 1}, {3, 1}});
  auto d = decompose(t, y);
  try {
    cut_hinge_lines(t, y, d, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnlabeledHingeNode);
  }
}

TEST(LabelGrafted, LeafCopiesItsAttachment) {
  // Line 0 - 1 - 2 with leaf 3 hanging off 1.
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}});
  auto y = reveal(4, 2, {{0, 0}, {2, 0}});
  auto d = decompose(t, y);
  auto s = label_grafted(t, y, d, cut_hinge_lines(t, y, d, {}));
  EXPECT_EQ(labels_of(s), (std::vector<ClassId>{0, 0, 0, 0}));
}

TEST(LabelGrafted, SubtreeOffInteriorNode) {
  // Line 0 -(3)- 1 -(1)- 2 with revealed 0 (class 2) and 2 (class 0); five
  // nodes hang off interior node 1, which takes class 2.
  auto t = from_edge_list({{0, 1, 3.0}, {1, 2, 1.0}, {1, 3, 1.0}, {3, 4, 1.0}, {3, 5, 1.0}, {5, 6, 1.0}, {6, 7, 1.0}});
  auto y = reveal(8, 3, {{0, 2}, {2, 0}});
  auto d = decompose(t, y);
  auto s = label_grafted(t, y, d, cut_hinge_lines(t, y, d, {}));
  EXPECT_EQ(labels_of(s), (std::vector<ClassId>{2, 2, 0, 2, 2, 2, 2, 2}));
}

TEST(LabelGrafted, SingleRevealedNodeLabelsEverything) {
  Rng rng(4);
  auto t = oracles::random_tree(30, rng);
  auto y = reveal(30, 4, {{17, 3}});
  auto d = decompose(t, y);
  auto s = label_grafted(t, y, d, cut_hinge_lines(t, y, d, {}));
  EXPECT_EQ(labels_of(s), std::vector<ClassId>(30, 3));
}

TEST(Predict, SingleRevealedNodeGivesConstant) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 0.2}, {1, 3, 4.0}});
  EXPECT_EQ(labels_of(predict_on_tree(t, reveal(4, 2, {{2, 1}}))), (std::vector<ClassId>{1, 1, 1, 1}));
}

TEST(Predict, UnitPathIsMinimumCutAndNash) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  auto y = reveal(4, 2, {{0, 0}, {3, 1}});
  auto s = predict_on_tree(t, y);
  GameInstance game(t, y);
  auto all = enumerate_pure_nash(game);
  EXPECT_NE(std::find(all.begin(), all.end(), s), all.end());
  auto cuts = min_cut_labelings(t, y);
  EXPECT_NE(std::find(cuts.begin(), cuts.end(), labels_of(s)), cuts.end());
}

TEST(Predict, RandomTwentyNodeTreesAreNash) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = oracles::random_tree(20, rng);
    auto y = oracles::random_reveal(20, 3, 0.25, rng);
    GameInstance game(t, y);
    auto check = is_pure_nash(game, predict_on_tree(t, y));
    ASSERT_TRUE(check.is_nash) << "trial " << trial << " player " << check.witness->player;
  }
}

TEST(Predict, NashOnTiedWeightsAndManyClasses) {
  Rng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + rng.below(80);
    const std::size_t c = 2 + rng.below(5);
    auto t = trial % 2 ? oracles::random_tree_tied(n, rng) : oracles::random_tree(n, rng);
    auto y = oracles::random_reveal(n, c, 0.05 + 0.5 * rng.uniform(), rng);
    auto s = predict_on_tree(t, y);
    GameInstance game(t, y);
    ASSERT_TRUE(is_pure_nash(game, s).is_nash) << "trial " << trial;
    for (Node u = 0; u < n; ++u) {
      if (y.is_revealed(u)) {
        ASSERT_EQ(s[u], y[u]);
      }
    }
  }
}

TEST(Predict, UnanchoredComponentTakesPlurality) {
  auto t = from_edge_list({{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}});
  auto y = reveal(5, 3, {{0, 2}, {1, 2}, {2, 1}});
  auto s = predict_on_tree(t, y);
  EXPECT_EQ(s[3], 2u);
  EXPECT_EQ(s[4], 2u);
}

TEST(Predict, NoTrainingLabels) {
  auto t = from_edge_list({{0, 1, 1.0}});
  EXPECT_THROW(predict_on_tree(t, PartialLabeling(2, 2)), Error);
}

TEST(Predict, AcceptsSpanningTree) {
  auto g = from_edge_list({{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}, {2, 3, 0.5}});
  auto tree = max_similarity_spanning_tree(g);
  auto y = reveal(4, 2, {{0, 0}, {3, 1}});
  auto s = predict(tree, y);
  auto tg = tree.to_graph();
  GameInstance game(tg, y);
  EXPECT_TRUE(is_pure_nash(game, s).is_nash);
  EXPECT_EQ(labels_of(s), (std::vector<ClassId>{0, 0, 0, 1}));
}
