#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radiocast/batch.hpp"
#include "radiocast/io.hpp"

namespace fs = std::filesystem;
using radiocast::Json;

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + RADIOCAST_CLI + std::string(" ") + args + " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t k; (k = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("radiocast_cli_" + std::to_string(::getpid()) + "_" +
                                       ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir);
    std::ofstream(dir / "g6.txt") << "6\n0 1\n0 2\n1 3\n2 4\n1 5\n2 5\n";
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string at(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, GenWritesEdgeList) {
  const auto r = run("gen --family path --n 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "3\n0 1\n1 2\n");
  EXPECT_EQ(run("gen --family cycle --n 2").code, 2);
  EXPECT_EQ(run("gen --family torus --n 5").code, 2);
  EXPECT_EQ(run("gen --family random --n 5").code, 2);
  EXPECT_EQ(run("gen --family random --n 30 --p 0.2 --seed 9").out, run("gen --family random --n 30 --p 0.2 --seed 9").out);
}

TEST_F(Cli, LabelGolden) {
  const auto r = run("label --scheme b --source 0 " + at("g6.txt"));
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("scheme"), "lambda");
  EXPECT_EQ(j.at("labels"), Json::parse(R"(["10","10","10","00","01","00"])"));
  EXPECT_EQ(Json::parse(run("label --scheme ack --source 0 " + at("g6.txt")).out).at("labels"),
            Json::parse(R"(["100","100","100","000","010","001"])"));
  const Json arb = Json::parse(run("label --scheme arb " + at("g6.txt")).out);
  EXPECT_TRUE(arb.at("source").is_null());
  EXPECT_EQ(arb.at("labels").at(0), "111");
  EXPECT_EQ(run("label --scheme arb --source 1 " + at("g6.txt")).code, 2);
  EXPECT_EQ(run("label --scheme b " + at("g6.txt")).code, 2);
  EXPECT_EQ(run("label --scheme b --source 9 " + at("g6.txt")).code, 2);
  EXPECT_EQ(run("label --scheme b --source 0 " + at("missing.txt")).code, 2);
}

TEST_F(Cli, MalformedGraphIsUsageError) {
  std::ofstream(dir / "bad.txt") << "3\n0 1\n0 1\n";
  EXPECT_EQ(run("label --scheme b --source 0 " + at("bad.txt")).code, 2);
  std::ofstream(dir / "one.txt") << "1\n";
  EXPECT_EQ(run("label --scheme ack --source 0 " + at("one.txt")).code, 2);
}

TEST_F(Cli, StagesOutput) {
  const auto r = run("stages --source 0 " + at("g6.txt"));
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("last_stage"), 4);
  EXPECT_EQ(j.at("stages").at(1).at("dominators"), Json::parse("[1,2]"));
  EXPECT_EQ(j.at("stages").at(2).at("newly_informed"), Json::parse("[5]"));
}

TEST_F(Cli, SimulateAndVerify) {
  ASSERT_EQ(run("label --scheme ack --source 0 " + at("g6.txt") + " -o " + at("l.json")).code, 0);
  const auto sim = run("simulate --protocol ack " + at("g6.txt") + " " + at("l.json") + " -o " + at("t.json"));
  ASSERT_EQ(sim.code, 0);
  EXPECT_NE(sim.out.find("ack_round=7"), std::string::npos) << sim.out;
  const Json t = Json::parse(slurp(dir / "t.json"));
  EXPECT_EQ(t.at("final").at("ack_round"), 7);
  EXPECT_EQ(t.at("payload"), "6d75");

  const auto ver = run("verify " + at("g6.txt") + " " + at("l.json") + " " + at("t.json"));
  EXPECT_EQ(ver.code, 0) << ver.out;
  EXPECT_EQ(Json::parse(ver.out).at("pass"), true);

  Json bad = t;
  bad.at("rounds").at(2).at("tx").erase(0);
  std::ofstream(dir / "bad.json") << bad.dump();
  const auto fail = run("verify " + at("g6.txt") + " " + at("l.json") + " " + at("bad.json"));
  EXPECT_EQ(fail.code, 1);
  EXPECT_EQ(Json::parse(fail.out).at("pass"), false);

  ASSERT_EQ(run("stages --source 0 " + at("g6.txt") + " -o " + at("s.json")).code, 0);
  EXPECT_EQ(run("verify --all --stages " + at("s.json") + " " + at("g6.txt") + " " + at("l.json") + " " + at("t.json")).code, 0);
}

TEST_F(Cli, SimulateArbAndCommonRound) {
  ASSERT_EQ(run("label --scheme arb " + at("g6.txt") + " -o " + at("a.json")).code, 0);
  EXPECT_EQ(run("simulate --protocol arb " + at("g6.txt") + " " + at("a.json")).code, 2);
  const auto r = run("simulate --protocol arb --source 5 --message 0x00ff " + at("g6.txt") + " " + at("a.json") + " -o " + at("t.json"));
  ASSERT_EQ(r.code, 0);
  const Json t = Json::parse(slurp(dir / "t.json"));
  EXPECT_EQ(t.at("payload"), "00ff");
  EXPECT_EQ(t.at("final").at("common_known_round"), 24);
  EXPECT_EQ(run("verify " + at("g6.txt") + " " + at("a.json") + " " + at("t.json")).code, 0);

  ASSERT_EQ(run("label --scheme ack --source 0 " + at("g6.txt") + " -o " + at("l.json")).code, 0);
  const auto c = run("simulate --protocol common-round " + at("g6.txt") + " " + at("l.json") + " -o " + at("c.json"));
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(Json::parse(slurp(dir / "c.json")).at("final").at("common_known_round"), 14);
  EXPECT_EQ(run("verify " + at("g6.txt") + " " + at("l.json") + " " + at("c.json")).code, 0);
}

TEST_F(Cli, SimulateRejectsMismatches) {
  ASSERT_EQ(run("label --scheme b --source 0 " + at("g6.txt") + " -o " + at("l.json")).code, 0);
  EXPECT_EQ(run("simulate --protocol ack " + at("g6.txt") + " " + at("l.json")).code, 2);
  EXPECT_EQ(run("simulate --protocol b --source 2 " + at("g6.txt") + " " + at("l.json")).code, 2);
  EXPECT_EQ(run("simulate --protocol gossip " + at("g6.txt") + " " + at("l.json")).code, 2);
  EXPECT_EQ(run("simulate --protocol b --message 0xabc " + at("g6.txt") + " " + at("l.json")).code, 2);
  EXPECT_EQ(run("simulate --protocol b --max-rounds 0 " + at("g6.txt") + " " + at("l.json")).code, 2);
}

TEST_F(Cli, TimeoutWritesPartialTrace) {
  ASSERT_EQ(run("label --scheme b --source 0 " + at("g6.txt") + " -o " + at("l.json")).code, 0);
  const auto r = run("simulate --protocol b --max-rounds 2 " + at("g6.txt") + " " + at("l.json") + " -o " + at("t.json"));
  EXPECT_EQ(r.code, 3);
  const Json t = Json::parse(slurp(dir / "t.json"));
  EXPECT_EQ(t.at("rounds").size(), 2u);
  EXPECT_FALSE(t.at("final").contains("protocol"));
}

TEST_F(Cli, RoundCapFromEnvironment) {
  ASSERT_EQ(run("label --scheme b --source 0 " + at("g6.txt") + " -o " + at("l.json")).code, 0);
  const std::string args = "simulate --protocol b " + at("g6.txt") + " " + at("l.json") + " -o " + at("t.json");
  EXPECT_EQ(run(args, "RADIOCAST_MAX_ROUNDS=3").code, 3);
  EXPECT_EQ(run(args, "RADIOCAST_MAX_ROUNDS=5").code, 0);
  EXPECT_EQ(run(args, "RADIOCAST_MAX_ROUNDS=abc").code, 2);
  // the flag wins over the environment
  EXPECT_EQ(run(args + " --max-rounds 10", "RADIOCAST_MAX_ROUNDS=3").code, 0);
}

TEST_F(Cli, BatchDeterministicFamilies) {
  const auto r = run("batch --families path,cycle,star --sizes 4,8,16 --protocols b,ack");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, radiocast::kBatchCsvHeader);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "true") << line;
  }
  EXPECT_EQ(rows, 18);
  EXPECT_NE(r.out.find("path,4,1,0,lambda,b,5,5,,4,true"), std::string::npos) << r.out;
}

TEST_F(Cli, BatchRandomWithinBound) {
  const auto r = run("batch --families random --sizes 64 --trials 100 --protocols b --seed 1");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    ASSERT_EQ(f.size(), 11u) << line;
    EXPECT_LE(std::stoi(f[6]), 125) << line;
    EXPECT_EQ(f[10], "true") << line;
  }
  EXPECT_EQ(rows, 100);
}

TEST_F(Cli, BatchUsageErrors) {
  EXPECT_EQ(run("batch --families path --sizes ''").code, 2);
  EXPECT_EQ(run("batch --families path --sizes 1").code, 2);
  EXPECT_EQ(run("batch --families path --sizes 4 --protocols gossip").code, 2);
  EXPECT_EQ(run("batch --families blob --sizes 4").code, 2);
  EXPECT_EQ(run("batch --families path --sizes x").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, BatchTracesReproducible) {
  const std::string args = "batch --families random,grid --sizes 9,12 --trials 2 --protocols b,ack,arb,common-round --seed 5";
  ASSERT_EQ(run(args + " -o " + at("a.csv") + " --trace-dir " + at("ta")).code, 0);
  ASSERT_EQ(run(args + " -o " + at("b.csv") + " --trace-dir " + at("tb")).code, 0);
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "ta")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(dir / "tb" / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 32u);
}

TEST_F(Cli, ExhaustiveSmall) {
  const auto r = run("exhaustive --max-n 4 --arb");
  ASSERT_EQ(r.code, 0);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_EQ(j.at("sizes").at(2).at("graphs"), 38);
  EXPECT_EQ(run("exhaustive --max-n 9").code, 2);
}
