#pragma once

// Deterministic random inputs for property tests.

#include <Eigen/Core>
#include <random>
#include <utility>
#include <vector>

#include "adcon/graph.hpp"

namespace adcon::testing {

/// Connected by construction: random spanning tree plus extra edges.
inline GraphTopology random_connected_graph(std::mt19937& rng, int n,
                                            double extra_edge_prob = 0.3) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<GraphTopology::Edge> edges;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(order[static_cast<std::size_t>(pick(rng))],
                       order[static_cast<std::size_t>(i)]);
  }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int a = 1; a <= n; ++a) {
    for (int b = a + 1; b <= n; ++b) {
      const bool in_tree = std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
        return (e.first == a && e.second == b) || (e.first == b && e.second == a);
      });
      if (!in_tree && coin(rng) < extra_edge_prob) edges.emplace_back(a, b);
    }
  }
  return GraphTopology(n, std::move(edges));
}

/// Nonnegative gains with at least one strictly positive entry; a random
/// subset of the entries is zeroed.
inline Eigen::VectorXd random_gains(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> mag(0.0, 3.0);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Eigen::VectorXd k(n);
  for (int i = 0; i < n; ++i) k(i) = coin(rng) < 0.5 ? 0.0 : mag(rng);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_real_distribution<double> pos(0.5, 3.0);
  k(pick(rng)) = pos(rng);
  return k;
}

inline Eigen::VectorXd random_vector(std::mt19937& rng, int n, double lo = -2.0,
                                     double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

}  // namespace adcon::testing
