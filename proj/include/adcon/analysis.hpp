#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "adcon/controller.hpp"
#include "adcon/errors.hpp"
#include "adcon/graph.hpp"
#include "adcon/plant.hpp"
#include "adcon/scenario.hpp"
#include "adcon/trajectory.hpp"
#include "adcon/uncertainty.hpp"

namespace adcon {

/// Quadratic Lyapunov candidate of the closed loop:
///   V = 1/2 ( sum_i e_i^2
///           + sum_i gamma_i^-1 (w_hat_i - w_i)^2
///           + sum_ij gamma_ij^-1 (w_hat_ij - w_ij)^2 ).
/// Zero exactly at (e, w_tilde) = 0 and radially unbounded. The true weights
/// come from the harness side; the controller never sees them.
inline double lyapunov_value(const Eigen::VectorXd& e, const EstimatorState& est,
                             const TrueWeights& w, const ControllerConfig& cfg) {
  if (est.w_hat_node.size() != e.size() || w.node.size() != e.size() ||
      cfg.gamma_node.size() != e.size() || est.w_hat_edge.size() != w.edge.size() ||
      cfg.gamma_edge.size() != w.edge.size()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "lyapunov_value: sizes do not match");
  }
  double v = e.squaredNorm();
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double wt = est.w_hat_node(i) - w.node(i);
    v += wt * wt / cfg.gamma_node(i);
  }
  for (Eigen::Index i = 0; i < w.edge.size(); ++i) {
    const double wt = est.w_hat_edge(i) - w.edge(i);
    v += wt * wt / cfg.gamma_edge(i);
  }
  return 0.5 * v;
}

/// Conservative bound w* on the Lyapunov-derivative perturbation caused by
/// time-varying coefficients. Each signal contributes
///   gamma^-1 * (projection-set diameter) * (signal derivative bound),
/// where the diameter 2 * theta_max * sqrt(1 + epsilon) bounds the estimation
/// error, summed over the node and its directed edges, then over nodes.
/// Exactly zero when every coefficient is constant.
inline double perturbation_bound(const UncertainCoefficients& uc,
                                 const ControllerConfig& cfg, const GraphTopology& g) {
  cfg.validate(g);
  if (uc.node_count() != g.node_count() ||
      uc.directed_edges() != g.directed_edges()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "perturbation_bound: coefficients do not match the topology");
  }
  const double diameter = 2.0 * projection_containment_limit(cfg.theta_max, cfg.epsilon);
  double w_star = 0.0;
  for (int i = 1; i <= g.node_count(); ++i) {
    w_star += diameter * uc.alpha_signal(i).derivative_bound() / cfg.gamma_node(i - 1);
  }
  const auto& betas = uc.beta_signals();
  for (std::size_t idx = 0; idx < betas.size(); ++idx) {
    w_star += diameter * betas[idx].derivative_bound() /
              cfg.gamma_edge(static_cast<Eigen::Index>(idx));
  }
  return w_star;
}

/// Radius w* / lambda_min(L + K) outside of which the Lyapunov candidate
/// decreases. Zero for constant coefficients (asymptotic tracking).
inline double ultimate_bound(const GraphTopology& g, const GainMatrix& gains,
                             double w_star) {
  if (!std::isfinite(w_star) || w_star < 0.0) {
    throw ValidationError(ValidationCode::InconsistentScenario,
                          "ultimate_bound: w* must be finite and nonnegative");
  }
  const GainCertificate cert = gain_certificate(g, gains);
  return w_star / cert.lambda_min;
}

enum class ConsensusVerdict { ConsensusAtAverage, ConsensusElsewhere, NoConsensus };

inline const char* to_string(ConsensusVerdict v) {
  switch (v) {
    case ConsensusVerdict::ConsensusAtAverage:
      return "consensus-at-average";
    case ConsensusVerdict::ConsensusElsewhere:
      return "consensus-elsewhere";
    case ConsensusVerdict::NoConsensus:
      return "no-consensus";
  }
  return "no-consensus";
}

struct ConsensusReport {
  ConsensusVerdict verdict = ConsensusVerdict::NoConsensus;
  double final_gap = 0.0;     // max_i |x_i(T) - mean(x0)|
  double final_spread = 0.0;  // max_i x_i(T) - min_i x_i(T)
  std::optional<double> settling_time;  // earliest time the gap stays below tolerance
  Eigen::VectorXd terminal_states;
  double gap_tolerance = 1e-2;
  double spread_tolerance = 1e-2;
};

inline ConsensusReport consensus_report(const Trajectory& traj, const Eigen::VectorXd& x0,
                                        double gap_tolerance = 1e-2,
                                        double spread_tolerance = 1e-2) {
  if (traj.empty()) {
    throw PreconditionError("consensus_report requires a non-empty trajectory");
  }
  ConsensusReport report;
  report.gap_tolerance = gap_tolerance;
  report.spread_tolerance = spread_tolerance;

  const double target = reference_fixed_point(x0);
  const auto gap_at = [target](const TrajectoryRow& row) {
    return (row.x.array() - target).abs().maxCoeff();
  };

  const TrajectoryRow& last = traj.back();
  report.terminal_states = last.x;
  report.final_gap = gap_at(last);
  report.final_spread = last.x.maxCoeff() - last.x.minCoeff();

  for (auto it = traj.rows.rbegin(); it != traj.rows.rend(); ++it) {
    if (gap_at(*it) > gap_tolerance) break;
    report.settling_time = it->t;
  }

  if (report.final_gap <= gap_tolerance) {
    report.verdict = ConsensusVerdict::ConsensusAtAverage;
  } else if (report.final_spread <= spread_tolerance) {
    report.verdict = ConsensusVerdict::ConsensusElsewhere;
  } else {
    report.verdict = ConsensusVerdict::NoConsensus;
  }
  return report;
}

/// Step-level stability diagnostics derived from a recorded trajectory.
struct DiagnosticsRecord {
  double t = 0.0;
  double V = 0.0;
  double V_dot_estimate = 0.0;  // central finite difference of V
  double e_norm = 0.0;
  double bound = 0.0;  // w* / lambda_min(L + K); 0 when the controller is off
  double consensus_gap = 0.0;
};

inline std::vector<DiagnosticsRecord> diagnostics_table(const Trajectory& traj,
                                                        const Scenario& sc) {
  double bound = 0.0;
  if (sc.controller) {
    const double w_star = perturbation_bound(sc.coefficients, *sc.controller, sc.graph);
    bound = ultimate_bound(sc.graph, GainMatrix(sc.controller->k), w_star);
  }
  const auto& rows = traj.rows;
  std::vector<DiagnosticsRecord> records(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    DiagnosticsRecord& rec = records[i];
    rec.t = rows[i].t;
    rec.V = rows[i].V;
    rec.e_norm = rows[i].e_norm;
    rec.bound = bound;
    rec.consensus_gap = rows[i].consensus_gap;
    if (rows.size() < 2) continue;
    const std::size_t lo = (i == 0) ? 0 : i - 1;
    const std::size_t hi = (i + 1 == rows.size()) ? i : i + 1;
    rec.V_dot_estimate = (rows[hi].V - rows[lo].V) / (rows[hi].t - rows[lo].t);
  }
  return records;
}

}  // namespace adcon
