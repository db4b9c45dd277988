#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "adcon/errors.hpp"
#include "adcon/graph.hpp"

namespace adcon {

inline bool exact_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && std::equal(a.data(), a.data() + a.size(), b.data());
}

/// Gains of the distributed adaptive controller. k holds the per-node
/// feedback gains (nonnegative, at least one positive), gamma_node and
/// gamma_edge the learning rates of the node and directed-edge estimators,
/// and (theta_max, epsilon) the projection set: estimates are confined to
/// |theta| <= theta_max * sqrt(1 + epsilon).
struct ControllerConfig {
  Eigen::VectorXd k;
  Eigen::VectorXd gamma_node;
  Eigen::VectorXd gamma_edge;  // canonical directed-edge order
  double theta_max = 10.0;
  double epsilon = 0.1;

  static ControllerConfig defaults(const GraphTopology& g) {
    ControllerConfig cfg;
    const int n = g.node_count();
    cfg.k = Eigen::VectorXd::Zero(n);
    cfg.k(0) = 5.0;
    if (n > 1) cfg.k(1) = 5.0;
    cfg.gamma_node = Eigen::VectorXd::Constant(n, 5.0);
    cfg.gamma_edge =
        Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.directed_edges().size()), 5.0);
    return cfg;
  }

  void validate(const GraphTopology& g) const {
    const int n = g.node_count();
    const auto m = static_cast<Eigen::Index>(g.directed_edges().size());
    if (k.size() != n || gamma_node.size() != n || gamma_edge.size() != m) {
      throw ValidationError(ValidationCode::DimensionMismatch,
                            "controller gain vectors do not match the topology");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!std::isfinite(k(i)) || k(i) < 0.0) {
        throw ValidationError(ValidationCode::NegativeGain,
                              "k_" + std::to_string(i + 1) + " must be finite and >= 0");
      }
    }
    if (k.maxCoeff() <= 0.0) {
      throw ValidationError(ValidationCode::NoPositiveGain,
                            "at least one feedback gain k_i must be positive");
    }
    auto check_rates = [](const Eigen::VectorXd& rates, const char* label) {
      for (Eigen::Index i = 0; i < rates.size(); ++i) {
        if (!std::isfinite(rates(i)) || rates(i) <= 0.0) {
          throw ValidationError(ValidationCode::NonPositiveLearningRate,
                                std::string(label) + " learning rates must be positive");
        }
      }
    };
    check_rates(gamma_node, "node");
    check_rates(gamma_edge, "edge");
    if (!std::isfinite(theta_max) || theta_max <= 0.0 || !std::isfinite(epsilon) ||
        epsilon <= 0.0 || epsilon >= 1.0) {
      throw ValidationError(ValidationCode::BadProjectionBounds,
                            "require theta_max > 0 and epsilon in (0,1)");
    }
  }

  bool operator==(const ControllerConfig& o) const {
    return exact_equal(k, o.k) && exact_equal(gamma_node, o.gamma_node) &&
           exact_equal(gamma_edge, o.gamma_edge) && theta_max == o.theta_max &&
           epsilon == o.epsilon;
  }
};

/// Adaptive estimates: one per node and one per directed edge.
struct EstimatorState {
  Eigen::VectorXd w_hat_node;
  Eigen::VectorXd w_hat_edge;  // canonical directed-edge order

  static EstimatorState zeros(const GraphTopology& g) {
    EstimatorState est;
    est.w_hat_node = Eigen::VectorXd::Zero(g.node_count());
    est.w_hat_edge =
        Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.directed_edges().size()));
    return est;
  }
};

/// Outer limit of the projection set for given bounds.
inline double projection_containment_limit(double theta_max, double epsilon) {
  return theta_max * std::sqrt(1.0 + epsilon);
}

/// Smooth scalar projection with convex indicator
///   f(theta) = (theta^2 - theta_max^2) / (epsilon * theta_max^2).
/// Returns y unchanged while f(theta) < 0 or the update points inward
/// (f'(theta) * y <= 0, i.e. theta * y <= 0); otherwise scales y by
/// (1 - f(theta)), which vanishes on the outer boundary f(theta) = 1. The set
/// { |theta| <= theta_max * sqrt(1 + epsilon) } is invariant under the
/// resulting flow.
inline double proj(double theta, double y, double theta_max, double epsilon) {
  if (!std::isfinite(theta_max) || theta_max <= 0.0 || !std::isfinite(epsilon) ||
      epsilon <= 0.0 || epsilon >= 1.0) {
    throw ValidationError(ValidationCode::BadProjectionBounds,
                          "proj requires theta_max > 0 and epsilon in (0,1)");
  }
  const double f = (theta * theta - theta_max * theta_max) / (epsilon * theta_max * theta_max);
  if (f < 0.0 || theta * y <= 0.0) return y;
  return y * (1.0 - f);
}

/// Control input of one agent, with state access routed through a callable
/// so the data dependencies are auditable:
///   u_i = -k_i (x_i - r_i) - w_hat_i x_i - sum_{j ~ i} w_hat_ij x_j.
template <class XRead>
double control_input_agent(const ControllerConfig& cfg, const EstimatorState& est,
                           const GraphTopology& g, int agent, XRead&& x_of,
                           double r_agent) {
  const double x_i = x_of(agent);
  double u = -cfg.k(agent - 1) * (x_i - r_agent) - est.w_hat_node(agent - 1) * x_i;
  for (int j : g.neighbors(agent)) {
    const int idx = *g.directed_edge_index(agent, j);
    u -= est.w_hat_edge(idx) * x_of(j);
  }
  return u;
}

inline Eigen::VectorXd control_input(const ControllerConfig& cfg,
                                     const EstimatorState& est, const GraphTopology& g,
                                     const Eigen::VectorXd& x, const Eigen::VectorXd& r) {
  const int n = g.node_count();
  if (x.size() != n || r.size() != n || est.w_hat_node.size() != n ||
      est.w_hat_edge.size() != static_cast<Eigen::Index>(g.directed_edges().size())) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "control_input: state or estimate sizes do not match");
  }
  Eigen::VectorXd u(n);
  const auto read = [&x](int node) { return x(node - 1); };
  for (int i = 1; i <= n; ++i) u(i - 1) = control_input_agent(cfg, est, g, i, read, r(i - 1));
  return u;
}

/// Estimator update rates of one agent:
///   d/dt w_hat_i  = gamma_i  Proj(w_hat_i,  x_i (x_i - r_i))
///   d/dt w_hat_ij = gamma_ij Proj(w_hat_ij, x_j (x_i - r_i))
/// Writes the node rate and the rates of the agent's outgoing edges.
template <class XRead>
void estimator_rates_agent(const ControllerConfig& cfg, const EstimatorState& est,
                           const GraphTopology& g, int agent, XRead&& x_of,
                           double r_agent, Eigen::VectorXd& node_rates,
                           Eigen::VectorXd& edge_rates) {
  const double x_i = x_of(agent);
  const double e_i = x_i - r_agent;
  node_rates(agent - 1) =
      cfg.gamma_node(agent - 1) *
      proj(est.w_hat_node(agent - 1), x_i * e_i, cfg.theta_max, cfg.epsilon);
  for (int j : g.neighbors(agent)) {
    const int idx = *g.directed_edge_index(agent, j);
    edge_rates(idx) = cfg.gamma_edge(idx) *
                      proj(est.w_hat_edge(idx), x_of(j) * e_i, cfg.theta_max, cfg.epsilon);
  }
}

inline EstimatorState estimator_rhs(const ControllerConfig& cfg, const EstimatorState& est,
                                    const GraphTopology& g, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& r) {
  const int n = g.node_count();
  if (x.size() != n || r.size() != n || est.w_hat_node.size() != n ||
      est.w_hat_edge.size() != static_cast<Eigen::Index>(g.directed_edges().size())) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "estimator_rhs: state or estimate sizes do not match");
  }
  EstimatorState rates = EstimatorState::zeros(g);
  const auto read = [&x](int node) { return x(node - 1); };
  for (int i = 1; i <= n; ++i) {
    estimator_rates_agent(cfg, est, g, i, read, r(i - 1), rates.w_hat_node,
                          rates.w_hat_edge);
  }
  return rates;
}

struct DistributednessReport {
  bool pass = true;
  /// Distinct state indices read on behalf of each agent (1-based, sorted).
  std::vector<std::vector<int>> reads;
  /// (agent, offending node) pairs where a non-neighbor state was read.
  std::vector<std::pair<int, int>> violations;
};

/// Runs `evaluate(agent, reader)` for every agent with a read-logging state
/// accessor and checks that each agent touches only its own state and its
/// neighbors' states.
template <class AgentEval>
DistributednessReport audit_locality(const GraphTopology& g, AgentEval&& evaluate) {
  DistributednessReport report;
  const int n = g.node_count();
  report.reads.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    std::vector<int> touched;
    const auto reader = [&touched](int node) {
      touched.push_back(node);
      return 1.0 + 0.1 * static_cast<double>(node);
    };
    evaluate(i, reader);
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    const auto& allowed = g.neighbors(i);
    for (int node : touched) {
      if (node != i && !std::binary_search(allowed.begin(), allowed.end(), node)) {
        report.pass = false;
        report.violations.emplace_back(i, node);
      }
    }
    report.reads[static_cast<std::size_t>(i - 1)] = std::move(touched);
  }
  return report;
}

/// Audits the shipped control law and update laws: evaluates both through the
/// logging accessor on synthetic nonzero estimates and confirms per-agent
/// locality of the data dependencies.
inline DistributednessReport distributedness_audit(const ControllerConfig& cfg,
                                                   const GraphTopology& g) {
  cfg.validate(g);
  EstimatorState est = EstimatorState::zeros(g);
  for (Eigen::Index i = 0; i < est.w_hat_node.size(); ++i) {
    est.w_hat_node(i) = 0.25 + 0.01 * static_cast<double>(i);
  }
  for (Eigen::Index i = 0; i < est.w_hat_edge.size(); ++i) {
    est.w_hat_edge(i) = -0.5 + 0.02 * static_cast<double>(i);
  }
  Eigen::VectorXd node_rates = Eigen::VectorXd::Zero(g.node_count());
  Eigen::VectorXd edge_rates =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.directed_edges().size()));
  return audit_locality(g, [&](int agent, const auto& reader) {
    const double r_agent = 0.5 * static_cast<double>(agent);
    control_input_agent(cfg, est, g, agent, reader, r_agent);
    estimator_rates_agent(cfg, est, g, agent, reader, r_agent, node_rates, edge_rates);
  });
}

}  // namespace adcon
