#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using namespace eigcount;
using namespace eigcount::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(EIGCOUNT_CONFIG_DIR) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("eigcount_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  static std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, CountMinimalConfig) {
  const auto cfg = write("c.json", R"({"matrix": {"dim": 3, "re": [[0.05,0,0],[0,0.5,0],[0,0,10]]}, "eps": 0.1})");
  const auto r = run({"count", "--config", cfg});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "eps,energy,m,count,at_least_m\n0.1,0.0,1,1,1\n");
}

TEST_F(CliTest, NonPositiveEpsIsConfigErrorWithLine) {
  const auto cfg = write("c.json", "{\n  \"matrix\": {\"dim\": 1, \"re\": [[1]]},\n  \"eps\": [0.1, -0.5]\n}\n");
  const auto r = run({"count", "--config", cfg});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(cfg + ":3:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("/eps/1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("eps must be"), std::string::npos) << r.err;

  const auto w = write("w.json", "{\n  \"matrix\": {\"dim\": 1, \"re\": [[1]]},\n  \"m\": 1,\n  \"eps\": 0\n}\n");
  const auto rw = run({"witness", "--config", w});
  EXPECT_EQ(rw.code, 2);
  EXPECT_NE(rw.err.find(w + ":4:"), std::string::npos) << rw.err;
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(run({"count"}).code, 2);
  EXPECT_EQ(run({"count", "--config", path("missing.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"count", "--config", write("a.json", "{ not json")}).code, 2);
  const auto unknown = run({"count", "--config", write("b.json", R"({"matrix": {"dim": 1, "re": [[1]]}, "eps": 1, "x": 2})")});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("/x"), std::string::npos) << unknown.err;
  const auto nested = write("m.json", "{\"dim\": 2,\n \"re\": [[1, 0],\n [0, \"q\"]]}\n");
  const auto rn = run({"count", "--config", write("c.json", R"({"matrix_file": "m.json", "eps": 1})")});
  EXPECT_EQ(rn.code, 2);
  EXPECT_NE(rn.err.find(nested + ":3:"), std::string::npos) << rn.err;
  EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
  EXPECT_EQ(run({"verify", "--override-tol", "core.unknown=1"}).code, 2);
  EXPECT_EQ(run({"verify", "--override-tol", "core.eigen_residual=abc"}).code, 2);
  EXPECT_EQ(run({"wegner", "--config", config("wegner_deterministic.json"), "--jobs", "0"}).code, 2);
}

TEST_F(CliTest, NumericalFailureExitsOne) {
  const auto cfg = write("r.json", R"({"b1": {"dim": 1, "re": [[3]]}, "b2": {"dim": 1, "re": [[0]]}, "eps": 0.1})");
  const auto r = run({"reduce", "--config", cfg});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("NormTooLarge"), std::string::npos) << r.err;

  const auto d = write("d.json", R"({"model": {"family": "anderson", "graph": {"path": 1}, "coupling": 1,
    "hopping": {"dim": 1, "re": [[0.9]]}}, "a": 3, "delta": 0.1, "trials": 50})");
  const auto rd = run({"det-event", "--config", d, "--jobs", "2"});
  EXPECT_EQ(rd.code, 1);
  EXPECT_NE(rd.err.find("trial 0"), std::string::npos) << rd.err;
}

TEST_F(CliTest, WitnessOnPlantedInstance) {
  const auto r = run({"witness", "--config", config("witness.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["found"].get<bool>());
  EXPECT_EQ(j["alpha"], json::array({0, 1}));
  EXPECT_EQ(j["beta"], json::array({0, 1}));
  EXPECT_EQ(j["m"], 2);
  EXPECT_DOUBLE_EQ(j["K"].get<double>(), counting_constant(2, 3).k);
  EXPECT_GE(j["margin"].get<double>(), 0.0);

  const auto none = run({"witness", "--config",
                         write("n.json", R"({"matrix": {"dim": 2, "re": [[10, 0], [0, 10]]}, "eps": 0.1, "m": 1})")});
  ASSERT_EQ(none.code, 0);
  EXPECT_FALSE(json::parse(none.out)["found"].get<bool>());

  const auto block = run({"witness", "--config", write("b.json", R"({"matrix": {"dim": 4,
    "re": [[0.01,0,0,0],[0,0.01,0,0],[0,0,5,0],[0,0,0,5]]}, "eps": 0.1, "m": 1, "block": 2})")});
  ASSERT_EQ(block.code, 0) << block.err;
  EXPECT_TRUE(json::parse(block.out)["found"].get<bool>());
}

TEST_F(CliTest, ReduceReportsSandwich) {
  const auto r = run({"reduce", "--config", config("reduce.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_GE(std::abs(j["a"].get<int>()), 3);
  EXPECT_LE(j["nu"].get<double>(), 0.5 + 1e-12);
  ASSERT_EQ(j["counts"].size(), 3u);
  for (const auto& c : j["counts"]) EXPECT_TRUE(c["holds"].get<bool>());
}

TEST_F(CliTest, WegnerDeterministicModelGivesIndicator) {
  const auto r = run({"wegner", "--config", config("wegner_deterministic.json"), "--out", path("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(path("w.csv")));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto fields = [&] {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
      return f;
    }();
    ASSERT_EQ(fields.size(), 9u);
    EXPECT_TRUE(fields[4] == "0.0" || fields[4] == "1.0") << line;
    ++rows;
  }
  EXPECT_EQ(rows, 6);
  const json summary = json::parse(slurp(path("w.csv.json")));
  EXPECT_EQ(summary["command"], "wegner");
  EXPECT_EQ(summary["reports"].size(), 6u);
}

TEST_F(CliTest, WegnerRepeatedRunsAreByteIdentical) {
  const auto once = [&](const std::vector<std::string>& extra) {
    std::vector<std::string> args{"wegner", "--config", config("wegner_anderson.json"), "--trials", "3000",
                                  "--out", path("r.csv")};
    args.insert(args.end(), extra.begin(), extra.end());
    EXPECT_EQ(run(args).code, 0);
    return std::pair{slurp(path("r.csv")), slurp(path("r.csv.json"))};
  };
  const auto a = once({});
  const auto b = once({"--jobs", "3"});
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  EXPECT_NE(a.first, once({"--seed", "2"}).first);

  const json s = json::parse(a.second);
  EXPECT_TRUE(s["fits"]["1"].contains("exponent"));
  EXPECT_EQ(s["config"]["trials"], 3000);
}

TEST_F(CliTest, DetEventSummaryHasExactSingleSite) {
  const auto r = run({"det-event", "--config", config("det_event_single_site.json"), "--trials", "2000", "--out",
                      path("d.csv"), "--summary", path("d.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json s = json::parse(slurp(path("d.json")));
  ASSERT_EQ(s["exact_single_site"].size(), 4u);
  EXPECT_NEAR(s["exact_single_site"][3].get<double>(), scalar_event_measure(3.0, 0.35, 0.1, 1.0) / 2.0, 1e-15);
}

TEST_F(CliTest, DumpConfigRoundTrips) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"count", "count.json"},         {"witness", "witness.json"},
      {"reduce", "reduce.json"},       {"wegner", "wegner_anderson.json"},
      {"wegner", "wegner_deterministic.json"}, {"det-event", "det_event_single_site.json"},
      {"verify", "verify.json"}};
  for (const auto& [cmd, file] : cases) {
    const auto first = run({cmd, "--config", config(file), "--dump-config"});
    ASSERT_EQ(first.code, 0) << file << ": " << first.err;
    std::string dumped = first.out;
    if (json::parse(dumped).contains("model_file")) {
      json j = json::parse(dumped);
      j["model_file"] = config(j["model_file"].get<std::string>());
      dumped = j.dump(2);
    }
    const auto again = run({cmd, "--config", write("dump.json", dumped), "--dump-config"});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(json::parse(again.out), json::parse(dumped)) << file;
  }
  const auto over = run({"wegner", "--config", config("wegner_anderson.json"), "--seed", "9", "--trials", "7",
                         "--dump-config"});
  const json j = json::parse(over.out);
  EXPECT_EQ(j["seed"], 9);
  EXPECT_EQ(j["trials"], 7);
}

TEST_F(CliTest, VerifyCoreSuitePasses) {
  const auto r = run({"verify", "--suite", "core"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("core.eigen_residual"), std::string::npos);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST_F(CliTest, VerifyCorruptedToleranceNamesProperty) {
  const auto r = run({"verify", "--suite", "core", "--override-tol", "core.eigen_residual=-1", "--seed", "5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("core.eigen_residual"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("--seed 5"), std::string::npos) << r.err;
  const auto cfg = write("v.json", R"({"suites": ["core"], "tolerances": {"core.eigen_residual": -1}})");
  EXPECT_EQ(run({"verify", "--config", cfg}).code, 1);
}

TEST_F(CliTest, VerifyOutcomeStableAcrossSeeds) {
  for (const char* seed : {"3", "77", "123456789"}) {
    const auto r = run({"verify", "--seed", seed, "--trials", "40"});
    EXPECT_EQ(r.code, 0) << "seed " << seed << ": " << r.err << r.out;
  }
}

TEST_F(CliTest, BinaryExitCodes) {
  const auto sh = [&](const std::string& args) {
    const std::string cmd =
        std::string("\"") + EIGCOUNT_CLI_PATH + "\" " + args + " >" + path("o.txt") + " 2>" + path("e.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(sh("count --config \"" + config("count.json") + "\""), 0);
  EXPECT_EQ(slurp(path("o.txt")), "eps,energy,m,count,at_least_m\n0.1,0.0,1,2,1\n0.1,0.0,2,2,1\n0.1,0.0,3,2,0\n");
  EXPECT_EQ(sh("count --config \"" + path("none.json") + "\""), 2);
  EXPECT_EQ(sh("--bogus"), 2);
  EXPECT_EQ(sh("verify --suite core --override-tol core.eigen_residual=-1"), 1);
  EXPECT_NE(slurp(path("e.txt")).find("core.eigen_residual"), std::string::npos);
}
