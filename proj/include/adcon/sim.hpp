#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "adcon/analysis.hpp"
#include "adcon/controller.hpp"
#include "adcon/errors.hpp"
#include "adcon/integrate.hpp"
#include "adcon/plant.hpp"
#include "adcon/scenario.hpp"
#include "adcon/trajectory.hpp"

namespace adcon {

/// Any state component beyond this magnitude aborts the run.
inline constexpr double kDivergenceLimit = 1e9;

namespace detail {

struct PackedLayout {
  int n = 0;
  int m = 0;
  bool with_estimator = false;

  explicit PackedLayout(const Scenario& sc)
      : n(sc.graph.node_count()),
        m(static_cast<int>(sc.graph.directed_edges().size())),
        with_estimator(sc.controller_enabled()) {}

  Eigen::Index size() const { return with_estimator ? 3 * n + m : 2 * n; }

  Eigen::VectorXd pack(const SimState& state) const {
    Eigen::VectorXd y(size());
    y.segment(0, n) = state.x;
    y.segment(n, n) = state.r;
    if (with_estimator) {
      y.segment(2 * n, n) = state.est.w_hat_node;
      y.segment(2 * n + n, m) = state.est.w_hat_edge;
    }
    return y;
  }

  SimState unpack(double t, const Eigen::VectorXd& y) const {
    SimState state;
    state.t = t;
    state.x = y.segment(0, n);
    state.r = y.segment(n, n);
    if (with_estimator) {
      state.est.w_hat_node = y.segment(2 * n, n);
      state.est.w_hat_edge = y.segment(2 * n + n, m);
    }
    return state;
  }
};

inline Eigen::VectorXd reference_part_rhs(const Scenario& sc, const Eigen::VectorXd& r) {
  return sc.reference_weights ? reference_rhs(sc.graph, *sc.reference_weights, r)
                              : reference_rhs(sc.graph, r);
}

/// Closed-loop vector field over the packed state [x; r; w_hat].
inline Eigen::VectorXd direct_field(const Scenario& sc, const PackedLayout& layout,
                                    double t, const Eigen::VectorXd& y) {
  const Eigen::VectorXd x = y.segment(0, layout.n);
  const Eigen::VectorXd r = y.segment(layout.n, layout.n);
  Eigen::VectorXd dy(y.size());
  if (layout.with_estimator) {
    EstimatorState est;
    est.w_hat_node = y.segment(2 * layout.n, layout.n);
    est.w_hat_edge = y.segment(2 * layout.n + layout.n, layout.m);
    const Eigen::VectorXd u = control_input(*sc.controller, est, sc.graph, x, r);
    dy.segment(0, layout.n) = plant_rhs(sc.graph, sc.coefficients, x, u, t);
    const EstimatorState rates = estimator_rhs(*sc.controller, est, sc.graph, x, r);
    dy.segment(2 * layout.n, layout.n) = rates.w_hat_node;
    dy.segment(2 * layout.n + layout.n, layout.m) = rates.w_hat_edge;
  } else {
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(layout.n);
    dy.segment(0, layout.n) = plant_rhs(sc.graph, sc.coefficients, x, u, t);
  }
  dy.segment(layout.n, layout.n) = reference_part_rhs(sc, r);
  return dy;
}

/// Error-form field over [e; r; w_hat]: integrates the tracking-error
/// dynamics directly, reconstructing x = e + r for the regressors.
inline Eigen::VectorXd error_field(const Scenario& sc, const PackedLayout& layout,
                                   double t, const Eigen::VectorXd& y) {
  const Eigen::VectorXd e = y.segment(0, layout.n);
  const Eigen::VectorXd r = y.segment(layout.n, layout.n);
  const Eigen::VectorXd x = e + r;
  EstimatorState est;
  est.w_hat_node = y.segment(2 * layout.n, layout.n);
  est.w_hat_edge = y.segment(2 * layout.n + layout.n, layout.m);
  Eigen::VectorXd dy(y.size());
  dy.segment(0, layout.n) =
      error_rhs(sc.graph, sc.coefficients, *sc.controller, est, x, r, t);
  dy.segment(layout.n, layout.n) = reference_part_rhs(sc, r);
  const EstimatorState rates = estimator_rhs(*sc.controller, est, sc.graph, x, r);
  dy.segment(2 * layout.n, layout.n) = rates.w_hat_node;
  dy.segment(2 * layout.n + layout.n, layout.m) = rates.w_hat_edge;
  return dy;
}

inline void check_finite(const Eigen::VectorXd& y, double t) {
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y(i)) || std::abs(y(i)) > kDivergenceLimit) {
      throw DivergenceError(t, "state diverged at t = " + std::to_string(t));
    }
  }
}

inline TrajectoryRow make_row(const Scenario& sc, double t, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& r, const EstimatorState& est,
                              double mean_x0) {
  TrajectoryRow row;
  row.t = t;
  row.x = x;
  row.r = r;
  row.e = x - r;
  row.e_norm = row.e.norm();
  row.consensus_gap = (x.array() - mean_x0).abs().maxCoeff();
  if (sc.controller_enabled()) {
    row.w_hat_node = est.w_hat_node;
    row.w_hat_edge = est.w_hat_edge;
    row.V = lyapunov_value(row.e, est, true_weights(sc.graph, sc.coefficients, t),
                           *sc.controller);
  } else {
    row.V = 0.5 * row.e.squaredNorm();
  }
  return row;
}

template <class Field>
RunResult run_packed(const Scenario& sc, const SimConfig& cfg, const PackedLayout& layout,
                     Eigen::VectorXd y, Field&& field, bool rows_are_error_form) {
  const double mean_x0 = reference_fixed_point(sc.x0);
  const long steps = cfg.step_count();
  RunResult result;
  result.trajectory.rows.reserve(static_cast<std::size_t>(steps / cfg.stride + 2));

  auto record = [&](long k, const Eigen::VectorXd& state) {
    const double t = static_cast<double>(k) * cfg.step_size;
    Eigen::VectorXd x = state.segment(0, layout.n);
    const Eigen::VectorXd r = state.segment(layout.n, layout.n);
    if (rows_are_error_form) x += r;  // stored block is e, not x
    EstimatorState est;
    if (layout.with_estimator) {
      est.w_hat_node = state.segment(2 * layout.n, layout.n);
      est.w_hat_edge = state.segment(2 * layout.n + layout.n, layout.m);
    }
    result.trajectory.rows.push_back(make_row(sc, t, x, r, est, mean_x0));
  };

  record(0, y);
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * cfg.step_size;
    try {
      y = integrator_step(cfg.integrator, field, t, cfg.step_size, y);
      check_finite(y, t + cfg.step_size);
    } catch (const DivergenceError& err) {
      result.diverged = true;
      result.divergence_time = err.time();
      return result;
    }
    if ((k + 1) % cfg.stride == 0 || k + 1 == steps) record(k + 1, y);
  }
  return result;
}

}  // namespace detail

/// Initial closed-loop state: the reference model starts at the plant's
/// initial condition (zero initial tracking error) and the estimates at zero.
inline SimState initial_state(const Scenario& sc) {
  SimState state;
  state.t = 0.0;
  state.x = sc.x0;
  state.r = sc.x0;
  if (sc.controller_enabled()) state.est = EstimatorState::zeros(sc.graph);
  return state;
}

/// One integrator step of the coupled closed loop. Throws DivergenceError if
/// the new state is non-finite or exceeds the magnitude guard.
inline SimState step(const SimState& state, const SimConfig& cfg, const Scenario& sc) {
  cfg.validate();
  const detail::PackedLayout layout(sc);
  auto field = [&sc, &layout](double t, const Eigen::VectorXd& y) {
    return detail::direct_field(sc, layout, t, y);
  };
  Eigen::VectorXd y = layout.pack(state);
  y = integrator_step(cfg.integrator, field, state.t, cfg.step_size, y);
  detail::check_finite(y, state.t + cfg.step_size);
  return layout.unpack(state.t + cfg.step_size, y);
}

/// Integrates the scenario over [0, horizon] from a caller-provided state.
/// On divergence the partial trajectory is retained and flagged.
inline RunResult run(const Scenario& sc, const SimConfig& cfg, const SimState& initial) {
  sc.validate();
  cfg.validate();
  const detail::PackedLayout layout(sc);
  auto field = [&sc, &layout](double t, const Eigen::VectorXd& y) {
    return detail::direct_field(sc, layout, t, y);
  };
  return detail::run_packed(sc, cfg, layout, layout.pack(initial), field, false);
}

inline RunResult run(const Scenario& sc, const SimConfig& cfg) {
  return run(sc, cfg, initial_state(sc));
}

inline RunResult run(const Scenario& sc) { return run(sc, sc.sim); }

/// Integrates the error-form system [e; r; w_hat] instead of [x; r; w_hat].
/// Rows report x reconstructed as r + e. Requires the controller.
inline RunResult run_error_form(const Scenario& sc, const SimConfig& cfg) {
  sc.validate();
  cfg.validate();
  if (!sc.controller_enabled()) {
    throw PreconditionError("run_error_form requires the controller");
  }
  const detail::PackedLayout layout(sc);
  auto field = [&sc, &layout](double t, const Eigen::VectorXd& y) {
    return detail::error_field(sc, layout, t, y);
  };
  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(layout.size());
  y0.segment(0, layout.n) = sc.x0 - sc.x0;  // e(0) = 0
  y0.segment(layout.n, layout.n) = sc.x0;
  return detail::run_packed(sc, cfg, layout, std::move(y0), field, true);
}

/// Runs the direct closed loop and the error-form system side by side and
/// returns the sup-norm deviation between x - r from the former and e from
/// the latter. A tight result certifies that the implemented error dynamics
/// match the plant/reference pair.
inline double dual_run_consistency(const Scenario& sc, const SimConfig& cfg) {
  if (!sc.controller_enabled()) {
    throw PreconditionError("dual_run_consistency requires the controller");
  }
  const RunResult direct = run(sc, cfg);
  const RunResult error_form = run_error_form(sc, cfg);
  if (direct.diverged || error_form.diverged) {
    const double t = direct.diverged ? direct.divergence_time
                                     : error_form.divergence_time;
    throw DivergenceError(t, "dual_run_consistency: a run diverged");
  }
  const auto& a = direct.trajectory.rows;
  const auto& b = error_form.trajectory.rows;
  double dev = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dev = std::max(dev, ((a[i].x - a[i].r) - b[i].e).cwiseAbs().maxCoeff());
  }
  return dev;
}

}  // namespace adcon
