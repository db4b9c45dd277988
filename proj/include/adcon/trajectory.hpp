#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "adcon/controller.hpp"

namespace adcon {

/// Full closed-loop state at one instant. The estimator vectors are empty
/// when the controller is disabled.
struct SimState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  EstimatorState est;
};

struct TrajectoryRow {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd r;
  Eigen::VectorXd e;
  Eigen::VectorXd w_hat_node;
  Eigen::VectorXd w_hat_edge;
  double V = 0.0;              // Lyapunov candidate (error-only term if uncontrolled)
  double e_norm = 0.0;         // ||x - r||_2
  double consensus_gap = 0.0;  // max_i |x_i - mean(x0)|
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;

  bool empty() const { return rows.empty(); }
  const TrajectoryRow& back() const { return rows.back(); }
};

struct RunResult {
  Trajectory trajectory;
  bool diverged = false;
  double divergence_time = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace adcon
