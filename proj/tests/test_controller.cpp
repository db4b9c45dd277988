#include "adcon/controller.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "adcon/scenario.hpp"
#include "adcon/sim.hpp"
#include "generators.hpp"

namespace adcon {
namespace {

using testing::random_connected_graph;
using testing::random_vector;

GraphTopology line3() { return GraphTopology(3, {{1, 2}, {2, 3}}); }

TEST(ControlInput, ZeroAtPerfectTrackingWithZeroEstimates) {
  const GraphTopology g = line3();
  const ControllerConfig cfg = ControllerConfig::defaults(g);
  const EstimatorState est = EstimatorState::zeros(g);
  const Eigen::Vector3d x(0.1, -0.7, 2.0);
  const Eigen::VectorXd u = control_input(cfg, est, g, x, x);
  EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
}

TEST(ControlInput, NodeEstimateAndGainArithmetic) {
  const GraphTopology g = line3();
  ControllerConfig cfg = ControllerConfig::defaults(g);
  cfg.k = Eigen::Vector3d(5.0, 0.0, 0.0);
  EstimatorState est = EstimatorState::zeros(g);
  est.w_hat_node(0) = 1.0;
  const Eigen::VectorXd u =
      control_input(cfg, est, g, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_NEAR(u(0), -6.0, 1e-15);
  EXPECT_EQ(u(1), 0.0);
  EXPECT_EQ(u(2), 0.0);
}

TEST(ControlInput, EdgeEstimateArithmetic) {
  const GraphTopology g = line3();
  ControllerConfig cfg = ControllerConfig::defaults(g);
  cfg.k = Eigen::Vector3d(1.0, 0.0, 0.0);
  EstimatorState est = EstimatorState::zeros(g);
  est.w_hat_edge(*g.directed_edge_index(1, 2)) = 0.5;
  const Eigen::VectorXd u =
      control_input(cfg, est, g, Eigen::Vector3d(0, 2, 0), Eigen::Vector3d::Zero());
  EXPECT_NEAR(u(0), -1.0, 1e-15);
}

TEST(ControlInput, RejectsDimensionMismatch) {
  const GraphTopology g = line3();
  const ControllerConfig cfg = ControllerConfig::defaults(g);
  const EstimatorState est = EstimatorState::zeros(g);
  EXPECT_THROW(control_input(cfg, est, g, Eigen::Vector2d(1, 2), Eigen::Vector2d(0, 0)),
               ValidationError);
}

TEST(Proj, IdentityInsideTheBound) {
  EXPECT_EQ(proj(0.0, 3.5, 10.0, 0.1), 3.5);
  std::mt19937 rng(81001);
  std::uniform_real_distribution<double> theta_dist(-10.0, 10.0);
  std::uniform_real_distribution<double> y_dist(-5.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = theta_dist(rng);
    const double y = y_dist(rng);
    EXPECT_EQ(proj(theta, y, 10.0, 0.1), y);
  }
}

TEST(Proj, ZeroAtOuterBoundaryPushingOut) {
  const double theta = 10.0 * std::sqrt(1.1);
  EXPECT_NEAR(proj(theta, 1.0, 10.0, 0.1), 0.0, 1e-12);
}

TEST(Proj, HalfwayIndicatorScalesByHalf) {
  // f(theta) = 0.5 at theta = theta_max * sqrt(1 + eps/2).
  const double theta = 10.0 * std::sqrt(1.0 + 0.05);
  EXPECT_NEAR(proj(theta, 1.0, 10.0, 0.1), 0.5, 1e-12);
}

TEST(Proj, InwardUpdatesPassThrough) {
  const double theta = 10.0 * std::sqrt(1.05);
  EXPECT_EQ(proj(theta, -2.0, 10.0, 0.1), -2.0);
  EXPECT_EQ(proj(-theta, 2.0, 10.0, 0.1), 2.0);
}

TEST(Proj, RejectsBadBounds) {
  EXPECT_THROW(proj(0.0, 1.0, 0.0, 0.1), ValidationError);
  EXPECT_THROW(proj(0.0, 1.0, -1.0, 0.1), ValidationError);
  EXPECT_THROW(proj(0.0, 1.0, 10.0, 0.0), ValidationError);
  EXPECT_THROW(proj(0.0, 1.0, 10.0, 1.0), ValidationError);
}

TEST(Proj, SampledContinuityModulus) {
  const double theta_max = 10.0;
  const double eps = 0.1;
  const double limit = projection_containment_limit(theta_max, eps);
  std::mt19937 rng(81002);
  std::uniform_real_distribution<double> theta_dist(-1.2 * limit, 1.2 * limit);
  std::uniform_real_distribution<double> y_dist(-4.0, 4.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double theta = theta_dist(rng);
    const double y = y_dist(rng);
    // Lipschitz constant of theta -> proj(theta, y) on the sampled range.
    const double lip = std::abs(y) * 2.0 * 1.2 * limit / (eps * theta_max * theta_max) + 1e-9;
    for (double delta : {1e-3, 1e-5, 1e-7}) {
      const double diff =
          std::abs(proj(theta + delta, y, theta_max, eps) - proj(theta, y, theta_max, eps));
      EXPECT_LE(diff, lip * delta + 1e-12);
    }
  }
}

TEST(EstimatorRhs, ZeroWhenTrackingIsPerfect) {
  const GraphTopology g = line3();
  const ControllerConfig cfg = ControllerConfig::defaults(g);
  EstimatorState est = EstimatorState::zeros(g);
  est.w_hat_node = Eigen::Vector3d(0.5, -0.25, 1.0);
  const Eigen::Vector3d x(0.4, 1.1, -0.2);
  const EstimatorState rates = estimator_rhs(cfg, est, g, x, x);
  EXPECT_EQ(rates.w_hat_node.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(rates.w_hat_edge.cwiseAbs().maxCoeff(), 0.0);
}

TEST(EstimatorRhs, InteriorUpdateIsGradientTimesRate) {
  const GraphTopology g = line3();
  const ControllerConfig cfg = ControllerConfig::defaults(g);
  const EstimatorState est = EstimatorState::zeros(g);
  const EstimatorState rates =
      estimator_rhs(cfg, est, g, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_NEAR(rates.w_hat_node(0), 5.0, 1e-15);  // gamma_1 * x_1 * e_1 = 5 * 1 * 1
  EXPECT_EQ(rates.w_hat_node(1), 0.0);
}

TEST(EstimatorRhs, OutwardMotionHaltsAtOuterBoundary) {
  const GraphTopology g = line3();
  const ControllerConfig cfg = ControllerConfig::defaults(g);
  EstimatorState est = EstimatorState::zeros(g);
  est.w_hat_node(0) = projection_containment_limit(cfg.theta_max, cfg.epsilon);
  const EstimatorState rates =
      estimator_rhs(cfg, est, g, Eigen::Vector3d(1, 0, 0), Eigen::Vector3d::Zero());
  EXPECT_NEAR(rates.w_hat_node(0), 0.0, 1e-9);
}

TEST(ControllerConfig, ValidationErrors) {
  const GraphTopology g = line3();
  ControllerConfig cfg = ControllerConfig::defaults(g);

  cfg.k = Eigen::Vector3d::Zero();
  try {
    cfg.validate(g);
    FAIL() << "all-zero k accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.code(), ValidationCode::NoPositiveGain);
  }

  cfg = ControllerConfig::defaults(g);
  cfg.k(1) = -1.0;
  EXPECT_THROW(cfg.validate(g), ValidationError);

  cfg = ControllerConfig::defaults(g);
  cfg.gamma_node(2) = 0.0;
  try {
    cfg.validate(g);
    FAIL() << "zero learning rate accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.code(), ValidationCode::NonPositiveLearningRate);
  }

  cfg = ControllerConfig::defaults(g);
  cfg.epsilon = 1.0;
  EXPECT_THROW(cfg.validate(g), ValidationError);

  cfg = ControllerConfig::defaults(g);
  cfg.gamma_edge = Eigen::VectorXd::Ones(2);
  EXPECT_THROW(cfg.validate(g), ValidationError);
}

TEST(Distributedness, LineGraphControllerPasses) {
  const GraphTopology g = line3();
  const auto report = distributedness_audit(ControllerConfig::defaults(g), g);
  EXPECT_TRUE(report.pass);
  EXPECT_TRUE(report.violations.empty());
  EXPECT_EQ(report.reads[0], (std::vector<int>{1, 2}));
  EXPECT_EQ(report.reads[1], (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(report.reads[2], (std::vector<int>{2, 3}));
}

TEST(Distributedness, CompleteGraphControllerPasses) {
  const GraphTopology g(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
  const auto report = distributedness_audit(ControllerConfig::defaults(g), g);
  EXPECT_TRUE(report.pass);
}

TEST(Distributedness, AuditCatchesNonNeighborRead) {
  const GraphTopology g = line3();
  // A broken agent-1 law that peeks at the state of node 3.
  const auto report = audit_locality(g, [&](int agent, const auto& reader) {
    double acc = reader(agent);
    if (agent == 1) acc += reader(3);
    (void)acc;
  });
  EXPECT_FALSE(report.pass);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0], (std::pair<int, int>{1, 3}));
}

TEST(Distributedness, InputInvariantToNonNeighborPerturbation) {
  std::mt19937 rng(81003);
  std::uniform_int_distribution<int> size(4, 8);
  for (int trial = 0; trial < 50; ++trial) {
    const GraphTopology g = random_connected_graph(rng, size(rng), 0.2);
    const int n = g.node_count();
    ControllerConfig cfg = ControllerConfig::defaults(g);
    EstimatorState est;
    est.w_hat_node = random_vector(rng, n);
    est.w_hat_edge = random_vector(rng, static_cast<int>(g.directed_edges().size()));
    const Eigen::VectorXd r = random_vector(rng, n);
    Eigen::VectorXd x = random_vector(rng, n);

    for (int agent = 1; agent <= n; ++agent) {
      const auto& nbrs = g.neighbors(agent);
      int outsider = 0;
      for (int m = 1; m <= n; ++m) {
        if (m != agent && !std::binary_search(nbrs.begin(), nbrs.end(), m)) {
          outsider = m;
          break;
        }
      }
      if (outsider == 0) continue;
      const double before = control_input(cfg, est, g, x, r)(agent - 1);
      const double saved = x(outsider - 1);
      x(outsider - 1) += 17.5;
      const double after = control_input(cfg, est, g, x, r)(agent - 1);
      x(outsider - 1) = saved;
      EXPECT_EQ(before, after);
    }
  }
}

TEST(Distributedness, EstimatesStayInsideProjectionSet) {
  // The antagonistic controlled case drives the largest estimates.
  const Scenario sc = bundled_scenario("fig2c");
  SimConfig cfg = sc.sim;
  cfg.stride = 1;
  const RunResult result = run(sc, cfg);
  ASSERT_FALSE(result.diverged);
  const double limit =
      projection_containment_limit(sc.controller->theta_max, sc.controller->epsilon) +
      1e-6 * sc.controller->theta_max;
  for (const auto& row : result.trajectory.rows) {
    EXPECT_LE(row.w_hat_node.cwiseAbs().maxCoeff(), limit);
    EXPECT_LE(row.w_hat_edge.cwiseAbs().maxCoeff(), limit);
  }
}

TEST(Distributedness, LyapunovNonincreasingUnderConstantCoefficients) {
  const Scenario sc = bundled_scenario("fig2b");
  SimConfig cfg = sc.sim;
  cfg.stride = 1;
  const RunResult result = run(sc, cfg);
  ASSERT_FALSE(result.diverged);
  const auto& rows = result.trajectory.rows;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].V, rows[i - 1].V + 1e-6);
  }
}

}  // namespace
}  // namespace adcon
