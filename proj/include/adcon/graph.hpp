#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adcon/errors.hpp"

namespace adcon {

/// Scale-aware threshold below which a Laplacian-sized eigenvalue is treated
/// as zero.
inline double spectral_zero_tolerance(int node_count) {
  return 1e-10 * static_cast<double>(node_count);
}

/// Static, undirected interaction graph. Node ids are 1-based everywhere in
/// the public interface. Immutable after construction; all views (degree,
/// adjacency, Laplacian) are built once with integer arithmetic.
class GraphTopology {
 public:
  using Edge = std::pair<int, int>;

  GraphTopology() : GraphTopology(1, {}) {}

  GraphTopology(int node_count, std::vector<Edge> edge_list) : n_(node_count) {
    if (node_count < 1) {
      throw ValidationError(ValidationCode::BadNodeCount,
                            "node count must be at least 1, got " +
                                std::to_string(node_count));
    }
    for (auto& [a, b] : edge_list) {
      if (a < 1 || a > n_ || b < 1 || b > n_) {
        throw ValidationError(ValidationCode::NodeOutOfRange,
                              "edge (" + std::to_string(a) + "," +
                                  std::to_string(b) + ") references a node outside 1.." +
                                  std::to_string(n_));
      }
      if (a == b) {
        throw ValidationError(ValidationCode::SelfLoop,
                              "self-loop at node " + std::to_string(a));
      }
      if (a > b) std::swap(a, b);
    }
    std::sort(edge_list.begin(), edge_list.end());
    if (auto it = std::adjacent_find(edge_list.begin(), edge_list.end());
        it != edge_list.end()) {
      throw ValidationError(ValidationCode::DuplicateEdge,
                            "duplicate edge (" + std::to_string(it->first) + "," +
                                std::to_string(it->second) + ")");
    }
    edges_ = std::move(edge_list);

    adjacency_ = Eigen::MatrixXi::Zero(n_, n_);
    neighbors_.resize(static_cast<std::size_t>(n_));
    for (const auto& [a, b] : edges_) {
      adjacency_(a - 1, b - 1) = 1;
      adjacency_(b - 1, a - 1) = 1;
      neighbors_[static_cast<std::size_t>(a - 1)].push_back(b);
      neighbors_[static_cast<std::size_t>(b - 1)].push_back(a);
    }
    for (auto& list : neighbors_) std::sort(list.begin(), list.end());

    laplacian_ = -adjacency_;
    for (int i = 0; i < n_; ++i) {
      laplacian_(i, i) = static_cast<int>(neighbors_[static_cast<std::size_t>(i)].size());
    }

    directed_edges_.reserve(2 * edges_.size());
    for (int i = 1; i <= n_; ++i) {
      for (int j : neighbors(i)) directed_edges_.emplace_back(i, j);
    }
  }

  int node_count() const noexcept { return n_; }

  /// Undirected edges, normalized to (min,max) and sorted.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Both orientations of every edge, sorted lexicographically. This is the
  /// canonical order for every per-directed-edge quantity in the library
  /// (couplings, learning rates, estimates).
  const std::vector<Edge>& directed_edges() const noexcept { return directed_edges_; }

  std::optional<int> directed_edge_index(int from, int to) const {
    const Edge probe{from, to};
    auto it = std::lower_bound(directed_edges_.begin(), directed_edges_.end(), probe);
    if (it == directed_edges_.end() || *it != probe) return std::nullopt;
    return static_cast<int>(it - directed_edges_.begin());
  }

  int degree(int node) const {
    check_node(node);
    return static_cast<int>(neighbors_[static_cast<std::size_t>(node - 1)].size());
  }

  const std::vector<int>& neighbors(int node) const {
    check_node(node);
    return neighbors_[static_cast<std::size_t>(node - 1)];
  }

  const Eigen::MatrixXi& adjacency() const noexcept { return adjacency_; }

  /// Laplacian L = D - A in integer arithmetic; row i-1 corresponds to node i.
  const Eigen::MatrixXi& laplacian() const noexcept { return laplacian_; }

  /// Breadth-first reachability of every node from node 1.
  bool is_connected() const {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> frontier{1};
    seen[0] = 1;
    int visited = 1;
    while (!frontier.empty()) {
      const int node = frontier.back();
      frontier.pop_back();
      for (int next : neighbors(node)) {
        if (!seen[static_cast<std::size_t>(next - 1)]) {
          seen[static_cast<std::size_t>(next - 1)] = 1;
          ++visited;
          frontier.push_back(next);
        }
      }
    }
    return visited == n_;
  }

  bool operator==(const GraphTopology& other) const {
    return n_ == other.n_ && edges_ == other.edges_;
  }

 private:
  void check_node(int node) const {
    if (node < 1 || node > n_) {
      throw ValidationError(ValidationCode::UnknownNode,
                            "node id " + std::to_string(node) + " outside 1.." +
                                std::to_string(n_));
    }
  }

  int n_ = 1;
  std::vector<Edge> edges_;
  std::vector<Edge> directed_edges_;
  std::vector<std::vector<int>> neighbors_;
  Eigen::MatrixXi adjacency_;
  Eigen::MatrixXi laplacian_;
};

/// Diagonal feedback-gain matrix K = diag(k) with nonnegative entries.
class GainMatrix {
 public:
  explicit GainMatrix(Eigen::VectorXd k) : k_(std::move(k)) {
    for (Eigen::Index i = 0; i < k_.size(); ++i) {
      if (!std::isfinite(k_(i)) || k_(i) < 0.0) {
        throw ValidationError(ValidationCode::NegativeGain,
                              "gain k_" + std::to_string(i + 1) +
                                  " must be finite and nonnegative");
      }
    }
  }

  const Eigen::VectorXd& values() const noexcept { return k_; }

  Eigen::MatrixXd matrix() const { return k_.asDiagonal(); }

  bool has_positive_entry() const { return k_.size() > 0 && k_.maxCoeff() > 0.0; }

 private:
  Eigen::VectorXd k_;
};

/// Eigenvalues of the Laplacian in ascending order. For a connected graph the
/// first is zero (within spectral_zero_tolerance) and the second is positive.
inline Eigen::VectorXd laplacian_spectrum(const GraphTopology& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      g.laplacian().cast<double>(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

struct GainCertificate {
  double lambda_min = 0.0;
  bool positive_definite = false;
};

/// Certifies positive definiteness of L + K for a connected graph and a
/// nonnegative gain matrix with at least one strictly positive entry. Both
/// hypotheses are enforced; the certificate carries the smallest eigenvalue,
/// which also witnesses det(L + K) != 0.
inline GainCertificate gain_certificate(const GraphTopology& g,
                                            const GainMatrix& gains) {
  if (gains.values().size() != g.node_count()) {
    throw ValidationError(ValidationCode::DimensionMismatch,
                          "gain vector length does not match node count");
  }
  if (!g.is_connected()) {
    throw PreconditionError("certificate requires a connected graph");
  }
  if (!gains.has_positive_entry()) {
    throw PreconditionError("certificate requires at least one positive gain");
  }
  const Eigen::MatrixXd m = g.laplacian().cast<double>() + gains.matrix();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  GainCertificate cert;
  cert.lambda_min = solver.eigenvalues()(0);
  cert.positive_definite = cert.lambda_min > spectral_zero_tolerance(g.node_count());
  return cert;
}

}  // namespace adcon
