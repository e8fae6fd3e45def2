#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "tou/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::initializer_list<std::string> args) {
  std::vector<std::string> storage = {"tou"};
  storage.insert(storage.end(), args);
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = tou::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("tou_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({"--help"}).code == tou::kExitOk);
  CHECK(run({"no-such-command"}).code == tou::kExitUsage);
  CHECK(run({"simulate", "--alpha", "abc"}).code == tou::kExitUsage);
  CHECK(run({"--format", "xml", "simulate"}).code == tou::kExitUsage);
  CHECK(run({"returns"}).code == tou::kExitUsage);
}

TEST_CASE("data errors") {
  const auto dir = scratch("data");
  {
    std::ofstream f(dir / "bad.csv");
    f << "date,price\n2003-01-02,10\n2003-01-03,-1\n";
  }
  const auto r = run({"returns", "--input", (dir / "bad.csv").string()});
  CHECK(r.code == tou::kExitData);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run({"returns", "--input", (dir / "missing.csv").string()}).code == tou::kExitData);
  CHECK(run({"--out-dir", dir.string(), "simulate", "--alpha", "-1"}).code == tou::kExitData);
}

TEST_CASE("simulate is deterministic and config precedence holds") {
  const auto a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  REQUIRE(run({"--seed", "5", "--out-dir", a.string(), "simulate", "--n", "500"}).code == 0);
  REQUIRE(run({"--seed", "5", "--out-dir", b.string(), "simulate", "--n", "500"}).code == 0);
  CHECK(slurp(a / "simulate.tsv") == slurp(b / "simulate.tsv"));
  CHECK(slurp(a / "simulate.meta.json") == slurp(b / "simulate.meta.json"));

  {
    std::ofstream f(c / "config.json");
    f << R"({"seed": 5, "n": 400, "out_dir": ")" << c.string() << R"("})";
  }
  REQUIRE(run({"--config", (c / "config.json").string(), "simulate", "--n", "500"}).code == 0);
  CHECK(slurp(c / "simulate.tsv") == slurp(a / "simulate.tsv"));
  REQUIRE(run({"--config", (c / "config.json").string(), "--seed", "6", "simulate"}).code == 0);
  const auto tsv = slurp(c / "simulate.tsv");
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 401);
  CHECK(tsv != slurp(a / "simulate.tsv"));
}

TEST_CASE("analysis commands on a synthetic series") {
  const auto dir = scratch("analysis");
  const auto d = dir.string();
  REQUIRE(run({"--out-dir", d, "gen-synthetic"}).code == 0);
  const auto csv = (dir / "synthetic.csv").string();
  CHECK(run({"--out-dir", d, "returns", "--input", csv, "--delta", "5"}).code == 0);
  CHECK(run({"--out-dir", d, "tails", "--input", csv}).code == 0);
  CHECK(fs::exists(dir / "tail_plot_d20_right.tsv"));
  CHECK(run({"--out-dir", d, "spearman", "--input", csv}).code == 0);
  CHECK(run({"--out-dir", d, "--format", "json", "spearman", "--input", csv, "--mode", "increments"}).code == 0);
  CHECK(fs::exists(dir / "spearman_increments.json"));
  CHECK(run({"--out-dir", d, "copula-gof", "--input", csv}).code == 0);
  const auto first = slurp(dir / "copula_gof.tsv");
  CHECK(run({"--out-dir", d, "copula-gof", "--input", csv}).code == 0);
  CHECK(slurp(dir / "copula_gof.tsv") == first);
  CHECK(run({"--out-dir", d, "estimate-alpha", "--input", csv, "--increments-delta", "20"}).code == 0);
  const auto alpha = slurp(dir / "alpha.tsv");
  CHECK(alpha.find("rank_corr_increments") != std::string::npos);
  CHECK(alpha.find("band_crossing") != std::string::npos);
}
