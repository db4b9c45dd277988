// End-to-end checks of the command-line tool: verbs, exit codes, outputs.

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(ADCON_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 512> buffer{};
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return result;
  while (fgets(buffer.data(), buffer.size(), pipe) != nullptr) {
    result.output += buffer.data();
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("adcon_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, RunBundledScenario) {
  const fs::path out = fresh_dir("run");
  const CliResult result = run_cli("run --scenario fig1a --out " + out.string());
  EXPECT_EQ(result.exit_code, 0) << result.output;
  EXPECT_TRUE(fs::exists(out / "fig1a" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(out / "fig1a" / "diagnostics.csv"));

  std::ifstream summary(out / "fig1a" / "summary.json");
  ASSERT_TRUE(summary.good());
  nlohmann::json j;
  summary >> j;
  EXPECT_EQ(j.at("verdict").get<std::string>(), "consensus-at-average");
  fs::remove_all(out);
}

TEST(Cli, SeedFreeRunSucceeds) {
  const fs::path out = fresh_dir("seedfree");
  const CliResult result =
      run_cli("run --scenario fig1b --seed-free --out " + out.string());
  EXPECT_EQ(result.exit_code, 0) << result.output;
  fs::remove_all(out);
}

TEST(Cli, ListScenariosPrintsAllEight) {
  const CliResult result = run_cli("list-scenarios");
  EXPECT_EQ(result.exit_code, 0);
  for (const char* name :
       {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d"}) {
    EXPECT_NE(result.output.find(name), std::string::npos) << name;
  }
}

TEST(Cli, ValidateRejectsIllegalController) {
  const fs::path dir = fresh_dir("badscenario");
  const fs::path file = dir / "bad.json";
  {
    std::ofstream out(file);
    out << R"({
      "name": "bad",
      "graph": {"n": 2, "edges": [[1, 2]]},
      "coefficients": {
        "alpha": [{"kind": "constant", "base": 1.0},
                  {"kind": "constant", "base": 1.0}],
        "beta": [{"from": 1, "to": 2, "kind": "constant", "base": 1.0},
                 {"from": 2, "to": 1, "kind": "constant", "base": 1.0}]
      },
      "x0": [0.0, 1.0],
      "controller": {"k": [0.0, 0.0], "gamma_node": 5.0, "gamma_edge": 5.0},
      "sim": {"step_size": 0.001, "horizon": 1.0, "integrator": "rk4", "stride": 1}
    })";
  }
  const CliResult result = run_cli("validate --scenario " + file.string());
  EXPECT_EQ(result.exit_code, 2) << result.output;
  fs::remove_all(dir);
}

TEST(Cli, ValidateAcceptsBundled) {
  const CliResult result = run_cli("validate --scenario fig2c");
  EXPECT_EQ(result.exit_code, 0) << result.output;
}

TEST(Cli, MissingScenarioFileIsIoFailure) {
  const CliResult result = run_cli("validate --scenario /no/such/file.json");
  EXPECT_EQ(result.exit_code, 4) << result.output;
}

TEST(Cli, DivergentRunExitsWithCode3) {
  const fs::path dir = fresh_dir("diverge");
  const fs::path file = dir / "unstable.json";
  {
    std::ofstream out(file);
    // Negative damping on an isolated node: dx/dt = 5x.
    out << R"({
      "name": "unstable",
      "graph": {"n": 1, "edges": []},
      "coefficients": {"alpha": [{"kind": "constant", "base": -5.0}], "beta": []},
      "x0": [1.0],
      "sim": {"step_size": 0.001, "horizon": 15.0, "integrator": "rk4", "stride": 10}
    })";
  }
  const fs::path out_dir = dir / "out";
  const CliResult result =
      run_cli("run --scenario " + file.string() + " --out " + out_dir.string());
  EXPECT_EQ(result.exit_code, 3) << result.output;
  EXPECT_TRUE(fs::exists(out_dir / "unstable" / "trajectory.csv"));
  fs::remove_all(dir);
}

TEST(Cli, SweepWritesTable) {
  const fs::path dir = fresh_dir("sweep");
  const fs::path scenario_dir = fs::path(ADCON_SCENARIO_DIR);
  const CliResult result =
      run_cli("sweep --scenario " + (scenario_dir / "sweep_base.json").string() +
              " --axis gamma-scale --values 1,5,25 --out " + dir.string());
  EXPECT_EQ(result.exit_code, 0) << result.output;

  std::ifstream csv(dir / "sweep.csv");
  ASSERT_TRUE(csv.good());
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "axis,value,terminal_e_norm,settling_time,w_star,lambda_min,ultimate_bound");
  double prev_w_star = 1e99;
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // axis
    EXPECT_EQ(cell, "gamma-scale");
    for (int skip = 0; skip < 3; ++skip) std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');  // w_star
    const double w_star = std::strtod(cell.c_str(), nullptr);
    EXPECT_LT(w_star, prev_w_star);
    prev_w_star = w_star;
  }
  EXPECT_EQ(rows, 3);
  fs::remove_all(dir);
}

TEST(Cli, SweepRejectsUnknownAxis) {
  const CliResult result =
      run_cli("sweep --scenario fig2a --axis bogus --values 1,2 --out /tmp");
  EXPECT_EQ(result.exit_code, 2) << result.output;
}

}  // namespace
