#pragma once

#include <Eigen/Core>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adcon/controller.hpp"
#include "adcon/errors.hpp"
#include "adcon/graph.hpp"
#include "adcon/integrate.hpp"
#include "adcon/plant.hpp"
#include "adcon/uncertainty.hpp"

namespace adcon {

/// Everything one run needs: topology, uncertain couplings, initial
/// condition, optional controller, integration settings, and the optional
/// weighted reference model.
struct Scenario {
  std::string name;
  std::string description;
  GraphTopology graph;
  UncertainCoefficients coefficients;
  Eigen::VectorXd x0;
  std::optional<ControllerConfig> controller;
  SimConfig sim;
  std::optional<ReferenceWeights> reference_weights;

  bool controller_enabled() const { return controller.has_value(); }

  void validate() const {
    if (!graph.is_connected()) {
      throw ValidationError(ValidationCode::DisconnectedGraph,
                            "scenario '" + name + "': graph must be connected");
    }
    if (coefficients.node_count() != graph.node_count() ||
        coefficients.directed_edges() != graph.directed_edges()) {
      throw ValidationError(ValidationCode::InconsistentScenario,
                            "scenario '" + name +
                                "': coefficients do not match the graph topology");
    }
    if (x0.size() != graph.node_count()) {
      throw ValidationError(ValidationCode::DimensionMismatch,
                            "scenario '" + name + "': x0 length must equal node count");
    }
    for (Eigen::Index i = 0; i < x0.size(); ++i) {
      if (!std::isfinite(x0(i))) {
        throw ValidationError(ValidationCode::InconsistentScenario,
                              "scenario '" + name + "': x0 must be finite");
      }
    }
    if (controller) controller->validate(graph);
    sim.validate();
    if (reference_weights &&
        reference_weights->values().size() != graph.edges().size()) {
      throw ValidationError(ValidationCode::BadReferenceWeights,
                            "scenario '" + name +
                                "': need one reference weight per undirected edge");
    }
  }

  bool operator==(const Scenario& o) const {
    auto vec_eq = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return exact_equal(a, b);
    };
    return name == o.name && description == o.description && graph == o.graph &&
           coefficients == o.coefficients && vec_eq(x0, o.x0) &&
           controller == o.controller && sim == o.sim &&
           reference_weights == o.reference_weights;
  }
};

// ---------------------------------------------------------------------------
// JSON serialization. Canonical form: signals carry only the fields their
// kind uses; per-edge quantities are listed with explicit "from"/"to" so the
// files stay readable and order-independent.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json signal_to_json(const CoefficientSignal& s) {
  nlohmann::json j;
  switch (s.kind) {
    case CoefficientSignal::Kind::Constant:
      j["kind"] = "constant";
      j["base"] = s.base;
      break;
    case CoefficientSignal::Kind::Sinusoid:
      j["kind"] = "sinusoid";
      j["base"] = s.base;
      j["amplitude"] = s.amplitude;
      j["omega"] = s.omega;
      j["phase"] = s.phase;
      break;
    case CoefficientSignal::Kind::RampSaturated:
      j["kind"] = "ramp_saturated";
      j["base"] = s.base;
      j["rate"] = s.rate;
      j["saturation"] = s.saturation;
      break;
  }
  return j;
}

inline CoefficientSignal signal_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    return CoefficientSignal::constant(j.at("base").get<double>());
  }
  if (kind == "sinusoid") {
    CoefficientSignal s = CoefficientSignal::sinusoid(
        j.at("base").get<double>(), j.at("amplitude").get<double>(),
        j.at("omega").get<double>());
    if (j.contains("phase")) s.phase = j.at("phase").get<double>();
    return s;
  }
  if (kind == "ramp_saturated") {
    return CoefficientSignal::ramp_saturated(j.at("base").get<double>(),
                                             j.at("rate").get<double>(),
                                             j.at("saturation").get<double>());
  }
  throw ValidationError(ValidationCode::BadSignal, "unknown signal kind '" + kind + "'");
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& entry : j) v(i++) = entry.get<double>();
  return v;
}

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

/// Accepts either a single number (uniform) or a per-entry array.
inline Eigen::VectorXd rates_from_json(const nlohmann::json& j, Eigen::Index count) {
  if (j.is_number()) return Eigen::VectorXd::Constant(count, j.get<double>());
  return vector_from_json(j);
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["name"] = sc.name;
  if (!sc.description.empty()) j["description"] = sc.description;

  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : sc.graph.edges()) edges.push_back({a, b});
  j["graph"] = {{"n", sc.graph.node_count()}, {"edges", edges}};

  nlohmann::json alpha = nlohmann::json::array();
  for (const auto& s : sc.coefficients.alpha_signals()) {
    alpha.push_back(detail::signal_to_json(s));
  }
  nlohmann::json beta = nlohmann::json::array();
  const auto& de = sc.coefficients.directed_edges();
  const auto& betas = sc.coefficients.beta_signals();
  for (std::size_t idx = 0; idx < de.size(); ++idx) {
    nlohmann::json entry = detail::signal_to_json(betas[idx]);
    entry["from"] = de[idx].first;
    entry["to"] = de[idx].second;
    beta.push_back(std::move(entry));
  }
  j["coefficients"] = {{"alpha", alpha}, {"beta", beta}};

  j["x0"] = detail::vector_to_json(sc.x0);

  if (sc.controller) {
    j["controller"] = {{"k", detail::vector_to_json(sc.controller->k)},
                       {"gamma_node", detail::vector_to_json(sc.controller->gamma_node)},
                       {"gamma_edge", detail::vector_to_json(sc.controller->gamma_edge)},
                       {"theta_max", sc.controller->theta_max},
                       {"epsilon", sc.controller->epsilon}};
  }

  j["sim"] = {{"step_size", sc.sim.step_size},
              {"horizon", sc.sim.horizon},
              {"integrator", sc.sim.integrator == IntegratorKind::Rk4 ? "rk4" : "euler"},
              {"stride", sc.sim.stride}};

  if (sc.reference_weights) j["reference_weights"] = sc.reference_weights->values();
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  sc.name = j.at("name").get<std::string>();
  if (j.contains("description")) sc.description = j.at("description").get<std::string>();

  const auto& jg = j.at("graph");
  std::vector<GraphTopology::Edge> edges;
  for (const auto& e : jg.at("edges")) {
    edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  }
  sc.graph = GraphTopology(jg.at("n").get<int>(), std::move(edges));

  const auto& jc = j.at("coefficients");
  std::vector<CoefficientSignal> alpha;
  for (const auto& s : jc.at("alpha")) alpha.push_back(detail::signal_from_json(s));

  const auto& directed = sc.graph.directed_edges();
  std::vector<CoefficientSignal> beta(directed.size());
  std::vector<char> filled(directed.size(), 0);
  for (const auto& entry : jc.at("beta")) {
    const int from = entry.at("from").get<int>();
    const int to = entry.at("to").get<int>();
    const auto idx = sc.graph.directed_edge_index(from, to);
    if (!idx) {
      throw ValidationError(ValidationCode::UnknownEdge,
                            "beta entry (" + std::to_string(from) + "," +
                                std::to_string(to) + ") is not an edge of the graph");
    }
    if (filled[static_cast<std::size_t>(*idx)]) {
      throw ValidationError(ValidationCode::DuplicateEdge,
                            "beta entry (" + std::to_string(from) + "," +
                                std::to_string(to) + ") appears twice");
    }
    beta[static_cast<std::size_t>(*idx)] = detail::signal_from_json(entry);
    filled[static_cast<std::size_t>(*idx)] = 1;
  }
  for (std::size_t idx = 0; idx < filled.size(); ++idx) {
    if (!filled[idx]) {
      throw ValidationError(ValidationCode::InconsistentScenario,
                            "beta entry missing for edge (" +
                                std::to_string(directed[idx].first) + "," +
                                std::to_string(directed[idx].second) + ")");
    }
  }
  sc.coefficients = UncertainCoefficients(sc.graph, std::move(alpha), std::move(beta));

  sc.x0 = detail::vector_from_json(j.at("x0"));

  if (j.contains("controller") && !j.at("controller").is_null()) {
    const auto& jk = j.at("controller");
    ControllerConfig cfg;
    cfg.k = detail::vector_from_json(jk.at("k"));
    cfg.gamma_node = detail::rates_from_json(jk.at("gamma_node"), sc.graph.node_count());
    cfg.gamma_edge = detail::rates_from_json(
        jk.at("gamma_edge"), static_cast<Eigen::Index>(directed.size()));
    if (jk.contains("theta_max")) cfg.theta_max = jk.at("theta_max").get<double>();
    if (jk.contains("epsilon")) cfg.epsilon = jk.at("epsilon").get<double>();
    sc.controller = std::move(cfg);
  }

  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    if (js.contains("step_size")) sc.sim.step_size = js.at("step_size").get<double>();
    if (js.contains("horizon")) sc.sim.horizon = js.at("horizon").get<double>();
    if (js.contains("integrator")) {
      const std::string kind = js.at("integrator").get<std::string>();
      if (kind == "rk4") {
        sc.sim.integrator = IntegratorKind::Rk4;
      } else if (kind == "euler") {
        sc.sim.integrator = IntegratorKind::Euler;
      } else {
        throw ValidationError(ValidationCode::ParseError,
                              "unknown integrator '" + kind + "'");
      }
    }
    if (js.contains("stride")) sc.sim.stride = js.at("stride").get<int>();
  }

  if (j.contains("reference_weights")) {
    sc.reference_weights =
        ReferenceWeights(j.at("reference_weights").get<std::vector<double>>());
  }

  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Bundled scenarios: three agents on a line graph, initial condition
// (0.2, 0.4, 1.2). The four coefficient sets exercise matched, asymmetric,
// antagonistic, and detuned couplings; the controlled variants add the
// adaptive controller with k = (5,5,0) and learning rates 5.
// ---------------------------------------------------------------------------

namespace detail {

inline Scenario line3_case(char variant, bool controlled) {
  Scenario sc;
  sc.graph = GraphTopology(3, {{1, 2}, {2, 3}});

  double a2 = 2.0;
  // beta order: (1,2), (2,1), (2,3), (3,2)
  std::vector<double> b{1.0, 1.0, 1.0, 1.0};
  std::string what;
  switch (variant) {
    case 'a':
      what = "matched constant couplings";
      break;
    case 'b':
      a2 = 1.1;
      b = {1.0, 0.1, 1.0, 1.0};
      what = "asymmetric couplings";
      break;
    case 'c':
      b = {-1.0, -1.0, 1.0, 1.0};
      what = "antagonistic couplings";
      break;
    case 'd':
      a2 = 1.5;
      what = "detuned node damping";
      break;
    default:
      throw ValidationError(ValidationCode::ParseError, "unknown line3 variant");
  }

  std::vector<CoefficientSignal> alpha{CoefficientSignal::constant(1.0),
                                       CoefficientSignal::constant(a2),
                                       CoefficientSignal::constant(1.0)};
  std::vector<CoefficientSignal> beta;
  beta.reserve(b.size());
  for (double value : b) beta.push_back(CoefficientSignal::constant(value));
  sc.coefficients = UncertainCoefficients(sc.graph, std::move(alpha), std::move(beta));

  sc.x0 = Eigen::Vector3d(0.2, 0.4, 1.2);
  sc.sim.step_size = 1e-3;
  sc.sim.horizon = 15.0;
  sc.sim.integrator = IntegratorKind::Rk4;
  sc.sim.stride = 10;

  if (controlled) {
    sc.controller = ControllerConfig::defaults(sc.graph);
    sc.name = std::string("fig2") + variant;
    sc.description = "three agents on a line, " + what + ", adaptive controller on";
  } else {
    sc.name = std::string("fig1") + variant;
    sc.description = "three agents on a line, " + what + ", no control input";
  }
  return sc;
}

}  // namespace detail

inline std::vector<std::string> bundled_scenario_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d"};
}

inline bool is_bundled_scenario(const std::string& name) {
  const auto names = bundled_scenario_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

inline Scenario bundled_scenario(const std::string& name) {
  if (name.size() == 5 && name.starts_with("fig") && name[4] >= 'a' && name[4] <= 'd') {
    if (name[3] == '1') return detail::line3_case(name[4], false);
    if (name[3] == '2') return detail::line3_case(name[4], true);
  }
  throw ValidationError(ValidationCode::ParseError,
                        "unknown bundled scenario '" + name + "'");
}

/// Loads a scenario by bundled name or from a JSON file. Bundled names take
/// precedence.
inline Scenario load_scenario(const std::string& name_or_path) {
  if (is_bundled_scenario(name_or_path)) return bundled_scenario(name_or_path);
  std::ifstream in(name_or_path);
  if (!in) {
    throw IoError("cannot open scenario file '" + name_or_path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ValidationCode::ParseError,
                          "scenario '" + name_or_path + "': " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(ValidationCode::ParseError,
                          "scenario '" + name_or_path + "': " + e.what());
  }
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write scenario file '" + path + "'");
  }
  out << scenario_to_json(sc).dump(2) << '\n';
  if (!out) {
    throw IoError("failed writing scenario file '" + path + "'");
  }
}

}  // namespace adcon
