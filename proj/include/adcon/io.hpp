#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "adcon/analysis.hpp"
#include "adcon/errors.hpp"
#include "adcon/scenario.hpp"
#include "adcon/sim.hpp"
#include "adcon/trajectory.hpp"

namespace adcon {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trajectory_csv_header(int n) {
  std::string header = "t";
  auto block = [&header, n](const char* prefix) {
    for (int i = 1; i <= n; ++i) {
      header += ',';
      header += prefix;
      header += '_';
      header += std::to_string(i);
    }
  };
  block("x");
  block("r");
  block("e");
  header += ",V,e_norm,consensus_gap";
  return header;
}

inline std::string trajectory_csv(const Trajectory& traj) {
  if (traj.empty()) return "t,V,e_norm,consensus_gap\n";
  const int n = static_cast<int>(traj.rows.front().x.size());
  std::string out = trajectory_csv_header(n);
  out += '\n';
  for (const auto& row : traj.rows) {
    out += format_double(row.t);
    auto block = [&out](const Eigen::VectorXd& v) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += ',';
        out += format_double(v(i));
      }
    };
    block(row.x);
    block(row.r);
    block(row.e);
    out += ',';
    out += format_double(row.V);
    out += ',';
    out += format_double(row.e_norm);
    out += ',';
    out += format_double(row.consensus_gap);
    out += '\n';
  }
  return out;
}

inline std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out = "t,V,V_dot_estimate,e_norm,bound,consensus_gap\n";
  for (const auto& rec : records) {
    out += format_double(rec.t);
    out += ',';
    out += format_double(rec.V);
    out += ',';
    out += format_double(rec.V_dot_estimate);
    out += ',';
    out += format_double(rec.e_norm);
    out += ',';
    out += format_double(rec.bound);
    out += ',';
    out += format_double(rec.consensus_gap);
    out += '\n';
  }
  return out;
}

inline nlohmann::json run_summary(const Scenario& sc, const RunResult& result,
                                  const ConsensusReport& report) {
  nlohmann::json j;
  j["scenario"] = sc.name;
  j["controller_enabled"] = sc.controller_enabled();
  j["integrator"] = sc.sim.integrator == IntegratorKind::Rk4 ? "rk4" : "euler";
  j["step_size"] = sc.sim.step_size;
  j["horizon"] = sc.sim.horizon;
  j["rows"] = result.trajectory.rows.size();
  j["diverged"] = result.diverged;
  if (result.diverged) j["divergence_time"] = result.divergence_time;
  j["verdict"] = to_string(report.verdict);
  j["average_of_x0"] = reference_fixed_point(sc.x0);
  j["final_consensus_gap"] = report.final_gap;
  j["final_spread"] = report.final_spread;
  if (report.settling_time) j["settling_time"] = *report.settling_time;
  nlohmann::json terminal = nlohmann::json::array();
  for (Eigen::Index i = 0; i < report.terminal_states.size(); ++i) {
    terminal.push_back(report.terminal_states(i));
  }
  j["terminal_states"] = terminal;
  if (!result.trajectory.empty()) {
    j["final_e_norm"] = result.trajectory.back().e_norm;
  }
  if (sc.controller) {
    const double w_star = perturbation_bound(sc.coefficients, *sc.controller, sc.graph);
    const auto cert = gain_certificate(sc.graph, GainMatrix(sc.controller->k));
    j["w_star"] = w_star;
    j["lambda_min"] = cert.lambda_min;
    j["ultimate_bound"] = w_star / cert.lambda_min;
  }
  return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out) {
    throw IoError("failed writing '" + path.string() + "'");
  }
}

/// Writes trajectory.csv, diagnostics.csv, and summary.json into
/// out_dir/<scenario name>/ and returns that directory.
inline std::filesystem::path write_run_outputs(const Scenario& sc, const RunResult& result,
                                               const std::filesystem::path& out_dir) {
  const std::filesystem::path dir = out_dir / sc.name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  const ConsensusReport report = consensus_report(result.trajectory, sc.x0);
  write_text_file(dir / "trajectory.csv", trajectory_csv(result.trajectory));
  write_text_file(dir / "diagnostics.csv",
                  diagnostics_csv(diagnostics_table(result.trajectory, sc)));
  write_text_file(dir / "summary.json", run_summary(sc, result, report).dump(2) + "\n");
  return dir;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepAxis { GammaScale, KScale, DerivativeScale, StepSize };

inline const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::GammaScale:
      return "gamma-scale";
    case SweepAxis::KScale:
      return "k-scale";
    case SweepAxis::DerivativeScale:
      return "derivative-scale";
    case SweepAxis::StepSize:
      return "step-size";
  }
  return "gamma-scale";
}

inline SweepAxis sweep_axis_from_string(const std::string& s) {
  if (s == "gamma-scale") return SweepAxis::GammaScale;
  if (s == "k-scale") return SweepAxis::KScale;
  if (s == "derivative-scale") return SweepAxis::DerivativeScale;
  if (s == "step-size") return SweepAxis::StepSize;
  throw ValidationError(ValidationCode::ParseError, "unknown sweep axis '" + s + "'");
}

struct SweepRow {
  double value = 0.0;
  double terminal_e_norm = 0.0;
  std::optional<double> settling_time;
  double w_star = 0.0;
  double lambda_min = 0.0;
  double ultimate_bound = 0.0;
};

namespace detail {

inline CoefficientSignal scale_signal_rate(CoefficientSignal s, double factor) {
  switch (s.kind) {
    case CoefficientSignal::Kind::Constant:
      break;
    case CoefficientSignal::Kind::Sinusoid:
      s.omega *= factor;
      break;
    case CoefficientSignal::Kind::RampSaturated:
      s.rate *= factor;
      break;
  }
  return s;
}

inline Scenario apply_sweep_value(Scenario sc, SweepAxis axis, double value) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ValidationError(ValidationCode::ParseError,
                          "sweep values must be positive and finite");
  }
  switch (axis) {
    case SweepAxis::GammaScale:
      sc.controller->gamma_node *= value;
      sc.controller->gamma_edge *= value;
      break;
    case SweepAxis::KScale:
      sc.controller->k *= value;
      break;
    case SweepAxis::DerivativeScale: {
      std::vector<CoefficientSignal> alpha = sc.coefficients.alpha_signals();
      std::vector<CoefficientSignal> beta = sc.coefficients.beta_signals();
      for (auto& s : alpha) s = scale_signal_rate(s, value);
      for (auto& s : beta) s = scale_signal_rate(s, value);
      sc.coefficients = sc.coefficients.with_signals(std::move(alpha), std::move(beta));
      break;
    }
    case SweepAxis::StepSize:
      sc.sim.step_size = value;
      break;
  }
  return sc;
}

}  // namespace detail

/// Runs the base scenario once per value along the chosen axis. Requires the
/// controller (the reported w* and bound are controller quantities).
inline std::vector<SweepRow> run_sweep(const Scenario& base, SweepAxis axis,
                                       const std::vector<double>& values) {
  if (!base.controller_enabled()) {
    throw PreconditionError("sweep requires a controller-enabled scenario");
  }
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double value : values) {
    const Scenario sc = detail::apply_sweep_value(base, axis, value);
    sc.validate();
    const RunResult result = run(sc);
    if (result.diverged) {
      throw DivergenceError(result.divergence_time,
                            "sweep run diverged at " + std::string(to_string(axis)) +
                                " = " + format_double(value));
    }
    SweepRow row;
    row.value = value;
    row.terminal_e_norm = result.trajectory.back().e_norm;
    row.settling_time = consensus_report(result.trajectory, sc.x0).settling_time;
    row.w_star = perturbation_bound(sc.coefficients, *sc.controller, sc.graph);
    row.lambda_min = gain_certificate(sc.graph, GainMatrix(sc.controller->k)).lambda_min;
    row.ultimate_bound = row.w_star / row.lambda_min;
    rows.push_back(row);
  }
  return rows;
}

inline std::string sweep_csv(SweepAxis axis, const std::vector<SweepRow>& rows) {
  std::string out = "axis,value,terminal_e_norm,settling_time,w_star,lambda_min,ultimate_bound\n";
  for (const auto& row : rows) {
    out += to_string(axis);
    out += ',';
    out += format_double(row.value);
    out += ',';
    out += format_double(row.terminal_e_norm);
    out += ',';
    out += row.settling_time ? format_double(*row.settling_time) : std::string("nan");
    out += ',';
    out += format_double(row.w_star);
    out += ',';
    out += format_double(row.lambda_min);
    out += ',';
    out += format_double(row.ultimate_bound);
    out += '\n';
  }
  return out;
}

}  // namespace adcon
