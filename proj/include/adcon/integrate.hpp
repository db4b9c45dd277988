#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "adcon/errors.hpp"

namespace adcon {

enum class IntegratorKind { Rk4, Euler };

/// Fixed-step integration settings. Deterministic by construction: the same
/// configuration and scenario always produce the same trajectory bytes.
struct SimConfig {
  double step_size = 1e-3;
  double horizon = 15.0;
  IntegratorKind integrator = IntegratorKind::Rk4;
  int stride = 1;  // recorded rows are stride steps apart

  void validate() const {
    if (!std::isfinite(step_size) || step_size <= 0.0) {
      throw ValidationError(ValidationCode::BadStepSize,
                            "step size must be positive and finite");
    }
    if (!std::isfinite(horizon) || horizon < step_size) {
      throw ValidationError(ValidationCode::BadHorizon,
                            "horizon must be finite and at least one step long");
    }
    if (stride < 1) {
      throw ValidationError(ValidationCode::BadStride, "stride must be >= 1");
    }
  }

  /// Number of whole steps covering the horizon (horizon rounded to the
  /// nearest step).
  long step_count() const {
    return static_cast<long>(std::llround(horizon / step_size));
  }

  bool operator==(const SimConfig&) const = default;
};

/// One classical Runge-Kutta step of dy/dt = f(t, y).
template <class Field>
Eigen::VectorXd rk4_step(Field&& f, double t, double h, const Eigen::VectorXd& y) {
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, Eigen::VectorXd(y + 0.5 * h * k1));
  const Eigen::VectorXd k3 = f(t + 0.5 * h, Eigen::VectorXd(y + 0.5 * h * k2));
  const Eigen::VectorXd k4 = f(t + h, Eigen::VectorXd(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Field>
Eigen::VectorXd euler_step(Field&& f, double t, double h, const Eigen::VectorXd& y) {
  return y + h * f(t, y);
}

template <class Field>
Eigen::VectorXd integrator_step(IntegratorKind kind, Field&& f, double t, double h,
                                const Eigen::VectorXd& y) {
  switch (kind) {
    case IntegratorKind::Rk4:
      return rk4_step(f, t, h, y);
    case IntegratorKind::Euler:
      return euler_step(f, t, h, y);
  }
  return y;
}

}  // namespace adcon
