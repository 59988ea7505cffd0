#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

// Stdout only; stderr is discarded so error-path tests compare exit codes.
Result dipsim(const std::string& args) {
  std::string cmd = std::string(DIPSIM_PATH) + " " + args + " 2>/dev/null";
  Result r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  size_t k;
  while ((k = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, k);
  int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string golden(const std::string& name) {
  auto p = std::filesystem::path(__FILE__).parent_path() / "golden" / name;
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv(const std::string& s) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, HonestSetEqualityOnClique) {
  auto r = dipsim("run set-equality --gen clique:8 --prover honest --trials 1000");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_GE(j["accept_rate"].get<double>(), 0.95);
  EXPECT_EQ(j["n"], 8);
  EXPECT_EQ(j["trials"], 1000);
}

TEST(Cli, PlantedCliqueAlwaysAccepted) {
  auto r = dipsim("run clique --gen planted_clique:8,4 --K 4 --prover honest --trials 200");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(nlohmann::json::parse(r.out)["accept_rate"].get<double>(), 1.0);
}

TEST(Cli, RunJsonSchema) {
  auto r = dipsim("run tree-labeling --gen path:4 --trials 3 --seed 5");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  for (const char* k : {"protocol", "n", "trials", "accept_rate", "max_bits_per_node_per_round",
                        "mean_bits", "max_exchange_bits", "rounds", "seed"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["protocol"], "tree-labeling");
  EXPECT_EQ(j["max_bits_per_node_per_round"], 6);
  EXPECT_EQ(j["rounds"], 1);
  EXPECT_EQ(j["seed"], 5);
}

TEST(Cli, GoldenOutputs) {
  EXPECT_EQ(dipsim("run tree-labeling --gen path:4 --trials 3 --seed 5").out,
            golden("run_tree_labeling.json"));
  EXPECT_EQ(dipsim("sweep set-equality 8,16 --trials 20 --seed 3").out,
            golden("sweep_set_equality.csv"));
  EXPECT_EQ(dipsim("suite clique --gen planted_clique:8,4 --K 4 --trials 10 --seed 2").out,
            golden("suite_clique.json"));
  EXPECT_EQ(dipsim("run set-equality --gen cycle:6 --trials 10 --seed 7 --format csv").out,
            golden("run_set_equality.csv"));
}

TEST(Cli, SweepIsDeterministicPerSeed) {
  auto a = dipsim("sweep set-equality 8,16,32 --trials 30 --seed 11");
  auto b = dipsim("sweep set-equality 8,16,32 --trials 30 --seed 11");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto rows = csv(a.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "max_bits_per_node", "accept_rate"}));
  EXPECT_EQ(rows[1][0], "8");
  EXPECT_EQ(rows[3][0], "32");
}

TEST(Cli, SetEqualitySweepGrowsWithLogN) {
  auto r = dipsim("sweep set-equality 16,64,256 --trials 3");
  ASSERT_EQ(r.code, 0);
  auto rows = csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  double b16 = std::stod(rows[1][1]), b64 = std::stod(rows[2][1]), b256 = std::stod(rows[3][1]);
  // Equal log-steps must add equal bits, within one word of slack.
  EXPECT_GT(b64, b16);
  EXPECT_NEAR(b256 - b64, b64 - b16, 8.0);
  EXPECT_LE(b256 / std::log2(256.0), 2.0 * b16 / std::log2(16.0));
}

TEST(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(dipsim("run set-equality --prover no-such").code, 2);
  EXPECT_EQ(dipsim("run no-such-protocol").code, 2);
  EXPECT_EQ(dipsim("sweep set-equality \"\"").code, 2);
  EXPECT_EQ(dipsim("sweep set-equality 16,8").code, 2);
  EXPECT_EQ(dipsim("sweep set-equality 8,8").code, 2);
  EXPECT_EQ(dipsim("run set-equality --trials 0").code, 2);
}

TEST(Cli, MissingGraphFileExitsThree) {
  EXPECT_EQ(dipsim("run set-equality --graph /nonexistent/graph.txt").code, 3);
}

TEST(Cli, ListNamesProtocolsAndProvers) {
  auto r = dipsim("list");
  ASSERT_EQ(r.code, 0);
  for (const char* s : {"set-equality: honest", "clique: honest extra-mark", "tree-labeling:",
                        "ram-compiled:", "asym:", "fs-set-equality:", "dsym-loglog:"})
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
}

TEST(Cli, SuiteRunsEveryProver) {
  auto r = dipsim("suite set-equality --gen cycle:8 --trials 20");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[0]["prover"], "honest");
  for (const auto& e : j) EXPECT_TRUE(e.contains("accept_rate"));
}
