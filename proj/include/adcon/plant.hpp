#pragma once

#include <Eigen/Core>
#include <cmath>
#include <utility>
#include <vector>

#include "adcon/controller.hpp"
#include "adcon/errors.hpp"
#include "adcon/graph.hpp"
#include "adcon/uncertainty.hpp"

namespace adcon {

namespace detail {
inline void require_plant_sizes(const GraphTopology& g, const UncertainCoefficients& uc,
                                const Eigen::VectorXd& v, const char* who) {
  if (uc.node_count() != g.node_count() ||
      uc.directed_edges().size() != g.directed_edges().size() ||
      v.size() != g.node_count()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          std::string(who) + ": sizes do not match the topology");
  }
}
}  // namespace detail

/// Uncertain plant dynamics:
///   dx_i/dt = -alpha_i(t) x_i + sum_{j ~ i} beta_ij(t) x_j + u_i.
inline Eigen::VectorXd plant_rhs(const GraphTopology& g, const UncertainCoefficients& uc,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                                 double t) {
  detail::require_plant_sizes(g, uc, x, "plant_rhs");
  if (u.size() != x.size()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "plant_rhs: control vector length mismatch");
  }
  const int n = g.node_count();
  Eigen::VectorXd dx(n);
  for (int i = 1; i <= n; ++i) {
    dx(i - 1) = -uc.eval_alpha(i, t) * x(i - 1) + u(i - 1);
  }
  const auto& edges = uc.directed_edges();
  const auto& betas = uc.beta_signals();
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    dx(edges[idx].first - 1) += betas[idx].value(t) * x(edges[idx].second - 1);
  }
  return dx;
}

/// Symmetric positive weights for the generalized reference model, one per
/// undirected edge in the graph's edge order. The diagonal terms are implied
/// (xi_ii = sum of the incident weights) and never stored.
class ReferenceWeights {
 public:
  explicit ReferenceWeights(std::vector<double> xi) : xi_(std::move(xi)) {
    for (double w : xi_) {
      if (!std::isfinite(w) || w <= 0.0) {
        throw ValidationError(ValidationCode::BadReferenceWeights,
                              "reference weights must be finite and positive");
      }
    }
  }

  const std::vector<double>& values() const noexcept { return xi_; }

  bool operator==(const ReferenceWeights&) const = default;

 private:
  std::vector<double> xi_;
};

/// Reference model dynamics dr/dt = -L r, evaluated edgewise:
///   dr_i/dt = -sum_{j ~ i} (r_i - r_j).
inline Eigen::VectorXd reference_rhs(const GraphTopology& g, const Eigen::VectorXd& r) {
  if (r.size() != g.node_count()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "reference_rhs: state length mismatch");
  }
  Eigen::VectorXd dr = Eigen::VectorXd::Zero(g.node_count());
  for (const auto& [i, j] : g.edges()) {
    const double diff = r(i - 1) - r(j - 1);
    dr(i - 1) -= diff;
    dr(j - 1) += diff;
  }
  return dr;
}

/// Weighted variant: dr_i/dt = -sum_{j ~ i} xi_ij (r_i - r_j).
inline Eigen::VectorXd reference_rhs(const GraphTopology& g, const ReferenceWeights& xi,
                                     const Eigen::VectorXd& r) {
  if (r.size() != g.node_count() || xi.values().size() != g.edges().size()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "reference_rhs: state or weight length mismatch");
  }
  Eigen::VectorXd dr = Eigen::VectorXd::Zero(g.node_count());
  const auto& edges = g.edges();
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const auto& [i, j] = edges[idx];
    const double diff = xi.values()[idx] * (r(i - 1) - r(j - 1));
    dr(i - 1) -= diff;
    dr(j - 1) += diff;
  }
  return dr;
}

/// The consensus value the reference model settles at: the mean of the
/// initial condition.
inline double reference_fixed_point(const Eigen::VectorXd& x0) { return x0.mean(); }

/// Exact cancellation control, computable only with known coefficients:
///   u_i = -(d_i - alpha_i(t)) x_i + sum_{j ~ i} (1 - beta_ij(t)) x_j.
/// Test oracle: the closed loop under this input equals the reference
/// dynamics evaluated at x.
inline Eigen::VectorXd ideal_control_oracle(const GraphTopology& g,
                                            const UncertainCoefficients& uc,
                                            const Eigen::VectorXd& x, double t) {
  detail::require_plant_sizes(g, uc, x, "ideal_control_oracle");
  const int n = g.node_count();
  Eigen::VectorXd u(n);
  for (int i = 1; i <= n; ++i) {
    u(i - 1) = -(static_cast<double>(g.degree(i)) - uc.eval_alpha(i, t)) * x(i - 1);
  }
  const auto& edges = uc.directed_edges();
  const auto& betas = uc.beta_signals();
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    u(edges[idx].first - 1) += (1.0 - betas[idx].value(t)) * x(edges[idx].second - 1);
  }
  return u;
}

/// Ideal weights the estimator is chasing: w_i = d_i - alpha_i(t) per node and
/// w_ij = beta_ij(t) - 1 per directed edge.
struct TrueWeights {
  Eigen::VectorXd node;
  Eigen::VectorXd edge;
};

inline TrueWeights true_weights(const GraphTopology& g, const UncertainCoefficients& uc,
                                double t) {
  if (uc.node_count() != g.node_count() ||
      uc.directed_edges().size() != g.directed_edges().size()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "true_weights: coefficients do not match the topology");
  }
  TrueWeights w;
  const int n = g.node_count();
  w.node.resize(n);
  for (int i = 1; i <= n; ++i) {
    w.node(i - 1) = static_cast<double>(g.degree(i)) - uc.eval_alpha(i, t);
  }
  const auto& betas = uc.beta_signals();
  w.edge.resize(static_cast<Eigen::Index>(betas.size()));
  for (std::size_t idx = 0; idx < betas.size(); ++idx) {
    w.edge(static_cast<Eigen::Index>(idx)) = betas[idx].value(t) - 1.0;
  }
  return w;
}

/// Tracking-error dynamics of the closed loop under the adaptive input:
///   de_i/dt = -k_i e_i - sum_{j ~ i} (e_i - e_j)
///             - (w_hat_i - w_i) x_i - sum_{j ~ i} (w_hat_ij - w_ij) x_j.
/// Algebraically identical to plant_rhs(x, control_input(...)) -
/// reference_rhs(r); the identity is the module's central test surface.
inline Eigen::VectorXd error_rhs(const GraphTopology& g, const UncertainCoefficients& uc,
                                 const ControllerConfig& cfg, const EstimatorState& est,
                                 const Eigen::VectorXd& x, const Eigen::VectorXd& r,
                                 double t) {
  detail::require_plant_sizes(g, uc, x, "error_rhs");
  const int n = g.node_count();
  if (r.size() != n || cfg.k.size() != n || est.w_hat_node.size() != n ||
      est.w_hat_edge.size() != static_cast<Eigen::Index>(g.directed_edges().size())) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "error_rhs: sizes do not match the topology");
  }
  const TrueWeights w = true_weights(g, uc, t);
  const Eigen::VectorXd e = x - r;
  Eigen::VectorXd de(n);
  for (int i = 0; i < n; ++i) {
    de(i) = -cfg.k(i) * e(i) - (est.w_hat_node(i) - w.node(i)) * x(i);
  }
  for (const auto& [i, j] : g.edges()) {
    const double diff = e(i - 1) - e(j - 1);
    de(i - 1) -= diff;
    de(j - 1) += diff;
  }
  const auto& edges = g.directed_edges();
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const auto eidx = static_cast<Eigen::Index>(idx);
    de(edges[idx].first - 1) -=
        (est.w_hat_edge(eidx) - w.edge(eidx)) * x(edges[idx].second - 1);
  }
  return de;
}

}  // namespace adcon
