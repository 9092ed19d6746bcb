#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
};

Invocation run(const std::string& args) {
  const std::string cmd = std::string(EPIPLAN_CLI_PATH) + " " + args + " 2>/dev/null";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string bench(const char* family, const char* label) {
  return (fs::path(EPIPLAN_BENCHMARKS_DIR) / family / (std::string(label) + ".epl")).string();
}

std::string plan_lines(const std::string& out) {
  std::istringstream in(out);
  std::string kept;
  for (std::string line; std::getline(in, line);)
    if (!line.starts_with("#")) kept += line + "\n";
  return kept;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("epiplan_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, PlanPrintsActionsAndStats) {
  const Invocation r = run("plan " + bench("bbl", "BBL02"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(plan_lines(r.out), "move(-2,-2)\nmove(-2,-2)\n");
  const auto pos = r.out.find("# {");
  ASSERT_NE(pos, std::string::npos);
  const auto j = nlohmann::json::parse(r.out.substr(pos + 2));
  EXPECT_EQ(j.at("outcome"), "SOLVED");
  EXPECT_EQ(j.at("plan_length"), 2);
  for (const char* key : {"generated", "expanded", "distinct_states", "external_calls", "elapsed"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(Cli, PlanOutputFeedsCheck) {
  const Invocation r = run("plan " + bench("sn", "SN14") + " --stats csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# outcome,plan_length,"), std::string::npos);
  const Invocation c = run("check " + bench("sn", "SN14") + " " + write("p.txt", r.out));
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "valid\n");
}

TEST_F(Cli, NegativeOutcomes) {
  const Invocation unsolvable = run("plan " + bench("sn", "SN07"));
  EXPECT_EQ(unsolvable.code, 1);
  EXPECT_EQ(plan_lines(unsolvable.out), "UNSOLVABLE\n");

  const Invocation pruned = run("plan " + bench("sn", "SN07") + " --search novelty --width 1");
  EXPECT_EQ(pruned.code, 1);
  EXPECT_EQ(plan_lines(pruned.out), "PRUNED_EXHAUSTED\n");

  const Invocation limit = run("plan " + bench("bbl", "BBL03") + " --max-nodes 100");
  EXPECT_EQ(limit.code, 3);
  EXPECT_EQ(plan_lines(limit.out), "RESOURCE_LIMIT\n");
}

TEST_F(Cli, Eval) {
  const std::string scene = bench("bbl", "BBL01");
  EXPECT_EQ(run("eval " + scene + " --query 'K[a1] (vo3 = 3)'").out, "true\n");
  const Invocation no = run("eval " + scene + " --query 'K[a2] (vo3 = 3)'");
  EXPECT_EQ(no.out, "false\n");
  EXPECT_EQ(no.code, 1);
  EXPECT_EQ(run("eval " + scene + " --query 'CK[a1,a2] (S[a1] vo3)'").code, 0);
  EXPECT_EQ(run("eval " + scene + " --query 'K[nobody] (vo3 = 3)'").code, 2);
}

TEST_F(Cli, CheckVerdicts) {
  const std::string scene = bench("bbl", "BBL02");
  const Invocation empty = run("check " + scene + " " + write("empty.txt", ""));
  EXPECT_EQ(empty.code, 1);
  EXPECT_EQ(empty.out, "goal unmet\n");
  EXPECT_EQ(run("check " + scene + " " + write("bad.txt", "fly(1)\n")).code, 2);
  EXPECT_EQ(run("check " + scene + " " + (dir / "absent.txt").string()).code, 2);
}

TEST_F(Cli, UsageAndParseErrors) {
  EXPECT_EQ(run("plan /nonexistent/problem.epl").code, 2);
  EXPECT_EQ(run("plan " + write("broken.epl", "problem \"x\" agents")).code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("plan " + bench("sn", "SN01") + " --search astar").code, 2);
  EXPECT_EQ(run("bench chess " + dir.string()).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, ParseErrorsPointAtTheSource) {
  const std::string file = write("broken.epl", "problem \"x\"\nagents a\nperspective full { }\nvar x : 0..1 = 0\n"
                                               "operator o() { pre: 0 = 0 eff: x := x }\ngoal: K[a (x = 1)\n");
  const std::string cmd = std::string(EPIPLAN_CLI_PATH) + " plan " + file + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::array<char, 4096> buf{};
  std::string out;
  while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
  pclose(pipe);
  EXPECT_NE(out.find("broken.epl:6:"), std::string::npos) << out;
}

TEST_F(Cli, BenchWritesCsvAndInstances) {
  const Invocation r = run("bench sn " + dir.string());
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 1u + 14u);
  EXPECT_TRUE(fs::exists(dir / "sn.csv"));
  EXPECT_TRUE(fs::exists(dir / "SN01.epl"));
}
