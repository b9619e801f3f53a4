#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mucca/io.hpp"
#include "mucca/spanning.hpp"

namespace fs = std::filesystem;
using namespace mucca;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mucca_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  // Exit status of the CLI; stderr goes to err.txt.
  int run(const std::string& args) const {
    std::string cmd = std::string(MUCCA_CLI) + " " + args + " 2>" + path("err.txt");
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir_;
};

const char* kPath4 = "0 1 1\n1 2 1\n2 3 1\n";

}  // namespace

TEST_F(Cli, SpanningMstOfTriangle) {
  write("g.txt", "0 1 1\n1 2 2\n0 2 3\n");
  ASSERT_EQ(run("spanning --mode mst --graph " + path("g.txt") + " --out " + path("t.txt")), 0);
  std::ifstream in(path("t.txt"));
  auto t = io::read_edge_list(in);
  EXPECT_EQ(t.edge_count(), 2u);
  EXPECT_DOUBLE_EQ(t.total_weight(), 5.0);
}

TEST_F(Cli, SpanningRstIsReproducible) {
  write("g.txt", "0 1 1\n1 2 2\n0 2 3\n2 3 1\n3 0 2\n");
  ASSERT_EQ(run("spanning --mode rst --seed 5 --graph " + path("g.txt") + " --out " + path("a.txt")), 0);
  ASSERT_EQ(run("spanning --mode rst --seed 5 --graph " + path("g.txt") + " --out " + path("b.txt")), 0);
  EXPECT_EQ(read("a.txt"), read("b.txt"));
  std::ifstream in(path("a.txt"));
  EXPECT_TRUE(is_forest(io::read_edge_list(in)));
}

TEST_F(Cli, PredictWritesEveryNode) {
  write("g.txt", kPath4);
  write("y.txt", "0 0\n3 1\n");
  ASSERT_EQ(run("predict --tree mst --graph " + path("g.txt") + " --labels " + path("y.txt") + " --out " +
                path("p.txt")),
            0);
  EXPECT_EQ(read("p.txt"), "0 0\n1 0\n2 1\n3 1\n");
}

TEST_F(Cli, PredictCommitteeReadsStdin) {
  write("g.txt", kPath4);
  write("y.txt", "0 0\n3 1\n");
  ASSERT_EQ(run("predict --tree rst --committee 3 --seed 2 --labels " + path("y.txt") + " < " + path("g.txt") +
                " > " + path("p.txt")),
            0);
  EXPECT_EQ(read("p.txt"), "0 0\n1 0\n2 1\n3 1\n");
}

TEST_F(Cli, BaselinesAndEss) {
  write("g.txt", kPath4);
  write("y.txt", "0 0\n3 1\n");
  const std::string common = " --graph " + path("g.txt") + " --labels " + path("y.txt");
  ASSERT_EQ(run("baseline --algo labprop" + common + " --out " + path("lp.txt")), 0);
  EXPECT_EQ(read("lp.txt"), "0 0\n1 0\n2 1\n3 1\n");
  ASSERT_EQ(run("baseline --algo wmv" + common + " --out " + path("wmv.txt")), 0);
  EXPECT_EQ(read("wmv.txt"), "0 0\n1 0\n2 1\n3 1\n");
  ASSERT_EQ(run("solve-ess" + common + " --log " + path("log.csv") + " --out " + path("ess.txt")), 0);
  EXPECT_EQ(read("ess.txt").size(), 16u);
  EXPECT_EQ(read("log.csv").rfind("iteration,potential,max_delta\n", 0), 0u);
}

TEST_F(Cli, BuildGraphFromFeatures) {
  write("f.csv", "x,label\n0,0\n1,\n10,1\n");
  ASSERT_EQ(run("build-graph --k 1 --features " + path("f.csv") + " --out-graph " + path("g.txt") +
                " --out-labels " + path("y.txt")),
            0);
  std::ifstream in(path("g.txt"));
  auto g = io::read_edge_list(in);
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(read("y.txt"), "0 0\n2 1\n");
}

TEST_F(Cli, ExperimentWritesCsv) {
  std::string edges;
  for (int i = 0; i < 39; ++i) edges += std::to_string(i) + " " + std::to_string(i + 1) + " 1\n";
  write("g.txt", edges);
  std::string labels;
  for (int i = 0; i < 40; ++i) labels += std::to_string(i) + " " + std::to_string(i < 20 ? 0 : 1) + "\n";
  write("truth.txt", labels);
  write("exp.conf", "predictors = mucca:mst:1, wmv\nfractions = 0.1, 0.25\nruns = 2\nseed = 3\n");
  ASSERT_EQ(run("experiment --config " + path("exp.conf") + " --graph " + path("g.txt") + " --labels " +
                path("truth.txt") + " --out " + path("r.csv")),
            0);
  std::istringstream csv(read("r.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "algorithm,tree_mode,committee,fraction,run,seed,error,seconds");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 8);
  EXPECT_NE(read("err.txt").find("mucca+mst"), std::string::npos);
}

TEST_F(Cli, BadInputExitsWithCodeAndLine) {
  write("g.txt", "0 1 1\n1 2 -3\n");
  write("y.txt", "0 0\n");
  EXPECT_EQ(run("predict --graph " + path("g.txt") + " --labels " + path("y.txt")), 2);
  EXPECT_NE(read("err.txt").find("line 2"), std::string::npos);
  EXPECT_NE(run("predict --graph " + path("g.txt")), 0);
  EXPECT_NE(run("spanning --mode bogus --graph " + path("g.txt")), 0);
}
