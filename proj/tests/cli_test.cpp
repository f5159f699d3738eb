// Drives the installed command-line binary as a subprocess. The binary path
// and the scenario directory arrive as compile definitions from the build.
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#ifndef NUMSTAB_CLI_PATH
#error "NUMSTAB_CLI_PATH must point at the numstab binary"
#endif
#ifndef NUMSTAB_SCENARIO_DIR
#error "NUMSTAB_SCENARIO_DIR must point at the scenario files"
#endif

namespace {

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd =
      std::string(NUMSTAB_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf{};
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
    res.out.append(buf.data(), got);
  }
  int raw = pclose(pipe);
  res.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return res;
}

std::string scenario(const std::string& leaf) {
  return (std::filesystem::path(NUMSTAB_SCENARIO_DIR) / leaf).string();
}

std::filesystem::path work_dir() {
  auto dir = std::filesystem::temp_directory_path() / "numstab_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Pulls "key value" lines out of a summary blob.
double summary_number(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key + " ", 0) == 0) {
      return std::stod(line.substr(key.size() + 1));
    }
  }
  FAIL("summary key not found: " << key);
  return 0.0;
}

std::vector<std::string> csv_column(const std::string& text, int index) {
  std::vector<std::string> col;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int i = 0; i <= index; ++i) std::getline(cells, cell, ',');
    col.push_back(cell);
  }
  return col;
}

}  // namespace

TEST_CASE("cli without a subcommand is a usage error") {
  CHECK(run_cli("").status == 2);
  CHECK(run_cli("simulate").status == 2);  // missing --scenario
  CHECK(run_cli("frobnicate").status == 2);
}

TEST_CASE("cli simulate reproduces free cavity decay") {
  const auto dir = work_dir();
  const std::string csv = (dir / "decay.csv").string();
  RunResult res =
      run_cli("simulate --scenario " + scenario("decay.scenario") + " --out " +
              csv);
  REQUIRE(res.status == 0);

  const std::string text = slurp(csv);
  CHECK(text.rfind("t,dy,n_est,n_var,distance,drive\n", 0) == 0);

  const double n_final = summary_number(res.out, "final_n_est");
  CHECK(std::abs(n_final - 3.0 * std::exp(-1.0)) <
        0.01 * 3.0 * std::exp(-1.0));
  CHECK(summary_number(res.out, "final_time") == 1.0);
}

TEST_CASE("cli seed override changes the noise, not the grid") {
  const auto dir = work_dir();
  const std::string a = (dir / "seed_a.csv").string();
  const std::string b = (dir / "seed_b.csv").string();
  const std::string c = (dir / "seed_c.csv").string();
  const std::string base =
      "simulate --scenario " + scenario("decay.scenario") + " --no-snapshots ";
  REQUIRE(run_cli(base + "--seed 5 --out " + a).status == 0);
  REQUIRE(run_cli(base + "--seed 6 --out " + b).status == 0);
  REQUIRE(run_cli(base + "--seed 5 --out " + c).status == 0);

  const std::string ta = slurp(a), tb = slurp(b);
  CHECK(ta == slurp(c));  // same seed, bit-identical
  CHECK(ta != tb);
  CHECK(csv_column(ta, 0) == csv_column(tb, 0));  // time axis unaffected
  CHECK(csv_column(ta, 1) != csv_column(tb, 1));  // photocurrent differs
}

TEST_CASE("cli feasibility emits both conventions and valid json") {
  const auto dir = work_dir();
  const std::string jpath = (dir / "feas.json").string();
  RunResult res = run_cli("feasibility --scenario " +
                          scenario("table1.scenario") + " --json " + jpath);
  REQUIRE(res.status == 0);

  CHECK(summary_number(res.out, "as_declared.measurement_rate") ==
        doctest::Approx(3.2333e6).epsilon(1e-3));
  CHECK(summary_number(res.out, "as_declared.m_over_kappa") ==
        doctest::Approx(269.44).epsilon(1e-3));
  CHECK(summary_number(res.out, "all_ordinary.measurement_rate") ==
        doctest::Approx(8.19e4).epsilon(1e-3));

  nlohmann::json doc = nlohmann::json::parse(slurp(jpath));
  CHECK(doc["as_declared"]["measurement_rate"].get<double>() ==
        doctest::Approx(3.2333e6).epsilon(1e-3));
  CHECK(doc["all_ordinary"]["measurement_rate"].get<double>() ==
        doctest::Approx(8.19e4).epsilon(1e-3));
  CHECK(doc.contains("kappa_geometry"));
}

TEST_CASE("cli qfunc writes a vacuum grid peaking at 1/pi") {
  const auto dir = work_dir();
  const std::string gpath = (dir / "vac.qgrid").string();
  RunResult res = run_cli(
      "qfunc --state vacuum --n-max 8 --nx 21 --ny 21 --out " + gpath);
  REQUIRE(res.status == 0);

  // Center cell of an odd grid sits at alpha = 0. Rows hold
  // space-separated values, one row per real-axis point.
  const std::string text = slurp(gpath);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  for (int i = 0; i < 11; ++i) std::getline(in, line);
  std::istringstream cells(line);
  std::string cell;
  for (int i = 0; i < 11; ++i) cells >> cell;
  CHECK(std::stod(cell) == doctest::Approx(1.0 / 3.14159265358979324)
                               .epsilon(1e-12));
}

TEST_CASE("cli distinguishes configuration errors from invalidated runs") {
  const auto dir = work_dir();

  const std::string bad = (dir / "bad.scenario").string();
  {
    std::ofstream out(bad);
    out << R"({"simulation": {"dt": 1e-3, "t_final": 1, "typo_key": 1}})";
  }
  CHECK(run_cli("simulate --scenario " + bad).status == 2);

  // A coherent state far beyond the truncation overflows the ladder and
  // invalidates the run rather than returning quietly wrong numbers.
  const std::string clipped = (dir / "clipped.scenario").string();
  {
    std::ofstream out(clipped);
    out << R"({"simulation": {"dt": 1e-3, "t_final": 1, "gain": 0,
                "feedback": false, "n_max": 12, "n_star": 0,
                "initial_state": {"coherent": [3.2, 0.0]},
                "seed": 4}})";
  }
  RunResult res = run_cli("simulate --scenario " + clipped + " --out " +
                          (dir / "clipped.csv").string());
  CHECK(res.status == 3);
}
