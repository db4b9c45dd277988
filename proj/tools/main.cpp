// Command-line front end: scenario validation, single runs with CSV/JSON
// export, and parameter sweeps.

#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adcon/adcon.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> values;
  std::stringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    std::size_t consumed = 0;
    const double v = std::stod(token, &consumed);
    if (consumed != token.size()) {
      throw adcon::ValidationError(adcon::ValidationCode::ParseError,
                                   "bad sweep value '" + token + "'");
    }
    values.push_back(v);
  }
  if (values.empty()) {
    throw adcon::ValidationError(adcon::ValidationCode::ParseError,
                                 "no sweep values given");
  }
  return values;
}

int run_command(const std::string& scenario_spec, const std::string& out_dir,
                int stride_override, bool seed_free) {
  adcon::Scenario sc = adcon::load_scenario(scenario_spec);
  if (stride_override > 0) sc.sim.stride = stride_override;
  sc.validate();

  const adcon::RunResult result = adcon::run(sc);

  if (seed_free) {
    // Re-run and require byte-identical exports before writing anything.
    const adcon::RunResult again = adcon::run(sc);
    if (adcon::trajectory_csv(result.trajectory) !=
        adcon::trajectory_csv(again.trajectory)) {
      std::cerr << "determinism check failed: repeated run differs\n";
      return kExitInternal;
    }
  }

  const auto dir = adcon::write_run_outputs(sc, result, out_dir);
  const adcon::ConsensusReport report =
      adcon::consensus_report(result.trajectory, sc.x0);

  std::cout << sc.name << ": " << adcon::to_string(report.verdict)
            << "  target=" << adcon::format_double(adcon::reference_fixed_point(sc.x0))
            << "  gap=" << adcon::format_double(report.final_gap)
            << "  e_norm=" << adcon::format_double(result.trajectory.back().e_norm)
            << "\noutputs: " << dir.string() << "\n";

  if (result.diverged) {
    std::cerr << "run diverged at t = " << adcon::format_double(result.divergence_time)
              << " (partial trajectory written)\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int validate_command(const std::string& scenario_spec) {
  const adcon::Scenario sc = adcon::load_scenario(scenario_spec);
  sc.validate();
  std::cout << "ok: scenario '" << sc.name << "' is valid ("
            << sc.graph.node_count() << " nodes, " << sc.graph.edges().size()
            << " edges, controller " << (sc.controller_enabled() ? "on" : "off")
            << ")\n";
  return kExitOk;
}

int list_command() {
  for (const auto& name : adcon::bundled_scenario_names()) {
    const adcon::Scenario sc = adcon::bundled_scenario(name);
    std::cout << name << "  " << sc.description << "\n";
  }
  return kExitOk;
}

int sweep_command(const std::string& scenario_spec, const std::string& axis_name,
                  const std::string& values_csv, const std::string& out_dir) {
  const adcon::Scenario base = adcon::load_scenario(scenario_spec);
  base.validate();
  const adcon::SweepAxis axis = adcon::sweep_axis_from_string(axis_name);
  const std::vector<double> values = parse_values(values_csv);

  const std::vector<adcon::SweepRow> rows = adcon::run_sweep(base, axis, values);
  const std::string csv = adcon::sweep_csv(axis, rows);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw adcon::IoError("cannot create output directory '" + out_dir + "'");
  adcon::write_text_file(std::filesystem::path(out_dir) / "sweep.csv", csv);

  std::cout << csv;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic multiagent consensus simulator"};
  app.require_subcommand(1);

  std::string scenario_spec;
  std::string out_dir = "out";
  std::string axis_name;
  std::string values_csv;
  int stride_override = 0;
  bool seed_free = false;

  auto* run_cmd = app.add_subcommand("run", "simulate one scenario and export tables");
  run_cmd->add_option("--scenario", scenario_spec, "bundled name or scenario file")
      ->required();
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--stride", stride_override, "record every N-th step");
  run_cmd->add_flag("--seed-free", seed_free,
                    "re-run and require byte-identical results before writing");

  auto* validate_cmd = app.add_subcommand("validate", "check a scenario without running");
  validate_cmd->add_option("--scenario", scenario_spec, "bundled name or scenario file")
      ->required();

  app.add_subcommand("list-scenarios", "print the bundled scenarios");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario across parameter values");
  sweep_cmd->add_option("--scenario", scenario_spec, "bundled name or scenario file")
      ->required();
  sweep_cmd
      ->add_option("--axis", axis_name,
                   "one of gamma-scale, k-scale, derivative-scale, step-size")
      ->required();
  sweep_cmd->add_option("--values", values_csv, "comma-separated positive values")
      ->required();
  sweep_cmd->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (run_cmd->parsed()) {
      return run_command(scenario_spec, out_dir, stride_override, seed_free);
    }
    if (validate_cmd->parsed()) return validate_command(scenario_spec);
    if (sweep_cmd->parsed()) {
      return sweep_command(scenario_spec, axis_name, values_csv, out_dir);
    }
    return list_command();
  } catch (const adcon::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const adcon::PreconditionError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const adcon::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const adcon::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
