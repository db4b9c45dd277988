#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "adcon/errors.hpp"
#include "adcon/graph.hpp"

namespace adcon {

/// Deterministic scalar time signal with closed-form value and derivative
/// bounds. These are the coefficient models for the uncertain couplings:
///   constant        value = base
///   sinusoid        value = base + amplitude * sin(omega * t + phase)
///   ramp_saturated  value = base + clamp(rate * t, -saturation, saturation)
struct CoefficientSignal {
  enum class Kind { Constant, Sinusoid, RampSaturated };

  Kind kind = Kind::Constant;
  double base = 0.0;
  double amplitude = 0.0;   // sinusoid only
  double omega = 0.0;       // sinusoid only, rad/s
  double phase = 0.0;       // sinusoid only, rad
  double rate = 0.0;        // ramp only, units per second
  double saturation = 0.0;  // ramp only, maximum excursion from base, >= 0

  static CoefficientSignal constant(double value) {
    CoefficientSignal s;
    s.kind = Kind::Constant;
    s.base = value;
    return s;
  }

  /// Default phase of pi/2 makes the signal start at base + amplitude,
  /// i.e. base + amplitude * cos(omega * t).
  static CoefficientSignal sinusoid(double base, double amplitude, double omega,
                                    double phase = std::numbers::pi / 2.0) {
    CoefficientSignal s;
    s.kind = Kind::Sinusoid;
    s.base = base;
    s.amplitude = amplitude;
    s.omega = omega;
    s.phase = phase;
    return s;
  }

  static CoefficientSignal ramp_saturated(double base, double rate, double saturation) {
    CoefficientSignal s;
    s.kind = Kind::RampSaturated;
    s.base = base;
    s.rate = rate;
    s.saturation = saturation;
    return s;
  }

  double value(double t) const {
    switch (kind) {
      case Kind::Constant:
        return base;
      case Kind::Sinusoid:
        return base + amplitude * std::sin(omega * t + phase);
      case Kind::RampSaturated:
        return base + std::clamp(rate * t, -saturation, saturation);
    }
    return base;
  }

  /// sup over t >= 0 of |value(t)|.
  double value_bound() const {
    switch (kind) {
      case Kind::Constant:
        return std::abs(base);
      case Kind::Sinusoid:
        return std::abs(base) + std::abs(amplitude);
      case Kind::RampSaturated:
        return std::abs(base) + saturation;
    }
    return std::abs(base);
  }

  /// sup over t >= 0 of |d value / dt| (almost everywhere for the ramp).
  double derivative_bound() const {
    switch (kind) {
      case Kind::Constant:
        return 0.0;
      case Kind::Sinusoid:
        return std::abs(amplitude * omega);
      case Kind::RampSaturated:
        return std::abs(rate);
    }
    return 0.0;
  }

  bool is_constant() const { return derivative_bound() == 0.0; }

  void validate() const {
    const bool finite = std::isfinite(base) && std::isfinite(amplitude) &&
                        std::isfinite(omega) && std::isfinite(phase) &&
                        std::isfinite(rate) && std::isfinite(saturation);
    if (!finite || saturation < 0.0) {
      throw ValidationError(ValidationCode::BadSignal,
                            "signal parameters must be finite (saturation >= 0)");
    }
  }

  bool operator==(const CoefficientSignal&) const = default;
};

/// The unknown couplings of the uncertain graph: one node coefficient
/// alpha_i per node and one edge coefficient beta_ij per *directed* edge
/// (beta_ij and beta_ji are independent). Immutable after construction.
class UncertainCoefficients {
 public:
  UncertainCoefficients()
      : UncertainCoefficients(GraphTopology(),
                              {CoefficientSignal::constant(0.0)}, {}) {}

  UncertainCoefficients(const GraphTopology& g,
                        std::vector<CoefficientSignal> alpha,
                        std::vector<CoefficientSignal> beta)
      : n_(g.node_count()),
        directed_edges_(g.directed_edges()),
        alpha_(std::move(alpha)),
        beta_(std::move(beta)) {
    if (alpha_.size() != static_cast<std::size_t>(n_)) {
      throw ValidationError(ValidationCode::DimensionMismatch,
                            "need one alpha signal per node");
    }
    if (beta_.size() != directed_edges_.size()) {
      throw ValidationError(ValidationCode::DimensionMismatch,
                            "need one beta signal per directed edge");
    }
    for (const auto& s : alpha_) s.validate();
    for (const auto& s : beta_) s.validate();
  }

  /// Matched coefficients: alpha_i = degree(i), beta_ij = 1. Under these the
  /// uncontrolled plant already equals the reference model.
  static UncertainCoefficients nominal(const GraphTopology& g) {
    std::vector<CoefficientSignal> alpha;
    alpha.reserve(static_cast<std::size_t>(g.node_count()));
    for (int i = 1; i <= g.node_count(); ++i) {
      alpha.push_back(CoefficientSignal::constant(static_cast<double>(g.degree(i))));
    }
    std::vector<CoefficientSignal> beta(g.directed_edges().size(),
                                        CoefficientSignal::constant(1.0));
    return UncertainCoefficients(g, std::move(alpha), std::move(beta));
  }

  /// Copy with replaced signal lists (same topology).
  UncertainCoefficients with_signals(std::vector<CoefficientSignal> alpha,
                                     std::vector<CoefficientSignal> beta) const {
    UncertainCoefficients out = *this;
    if (alpha.size() != alpha_.size() || beta.size() != beta_.size()) {
      throw ValidationError(ValidationCode::DimensionMismatch,
                            "replacement signal lists must keep their lengths");
    }
    for (const auto& s : alpha) s.validate();
    for (const auto& s : beta) s.validate();
    out.alpha_ = std::move(alpha);
    out.beta_ = std::move(beta);
    return out;
  }

  int node_count() const noexcept { return n_; }

  const std::vector<GraphTopology::Edge>& directed_edges() const noexcept {
    return directed_edges_;
  }

  double eval_alpha(int node, double t) const { return alpha_signal(node).value(t); }

  double eval_beta(int from, int to, double t) const {
    return beta_signal(from, to).value(t);
  }

  const CoefficientSignal& alpha_signal(int node) const {
    if (node < 1 || node > n_) {
      throw ValidationError(ValidationCode::UnknownNode,
                            "node id " + std::to_string(node) + " outside 1.." +
                                std::to_string(n_));
    }
    return alpha_[static_cast<std::size_t>(node - 1)];
  }

  const CoefficientSignal& beta_signal(int from, int to) const {
    return beta_[static_cast<std::size_t>(edge_index(from, to))];
  }

  const std::vector<CoefficientSignal>& alpha_signals() const noexcept { return alpha_; }

  /// Beta signals in the graph's canonical directed-edge order.
  const std::vector<CoefficientSignal>& beta_signals() const noexcept { return beta_; }

  /// Largest derivative bound over all coefficient signals; zero exactly when
  /// every coefficient is constant in value.
  double derivative_bound() const {
    double bound = 0.0;
    for (const auto& s : alpha_) bound = std::max(bound, s.derivative_bound());
    for (const auto& s : beta_) bound = std::max(bound, s.derivative_bound());
    return bound;
  }

  bool all_constant() const { return derivative_bound() == 0.0; }

  bool operator==(const UncertainCoefficients& other) const {
    return n_ == other.n_ && directed_edges_ == other.directed_edges_ &&
           alpha_ == other.alpha_ && beta_ == other.beta_;
  }

 private:
  int edge_index(int from, int to) const {
    const GraphTopology::Edge probe{from, to};
    auto it = std::lower_bound(directed_edges_.begin(), directed_edges_.end(), probe);
    if (it == directed_edges_.end() || *it != probe) {
      throw ValidationError(ValidationCode::UnknownEdge,
                            "(" + std::to_string(from) + "," + std::to_string(to) +
                                ") is not a directed edge of the topology");
    }
    return static_cast<int>(it - directed_edges_.begin());
  }

  int n_;
  std::vector<GraphTopology::Edge> directed_edges_;
  std::vector<CoefficientSignal> alpha_;
  std::vector<CoefficientSignal> beta_;
};

}  // namespace adcon
