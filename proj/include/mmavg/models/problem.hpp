#pragma once

#include "mmavg/etp/io.hpp"
#include "mmavg/models/bloch.hpp"
#include "mmavg/models/toy.hpp"

#include <functional>
#include <optional>
#include <string>

namespace mmavg {

/// A concrete linear problem du/dt = a_{t/eps^s} u on [0, T].
///
/// The fast variable is tau = t/eps^s; the engine works with eps^s, so the
/// harness converts user-facing eps through time_scale_power s.
struct Problem {
  std::string name;
  SharpFlatField field;
  Vector u0;
  double T = 10.0;
  int time_scale_power = 1;
  /// Closed-form solution u(t) for a user-facing eps, when known.
  std::function<Vector(double eps, double t)> exact;
  std::optional<ToyConfig> toy;
  std::optional<BlochConfig> bloch;

  double engine_eps(double eps) const { return std::pow(eps, time_scale_power); }
};

inline Problem toy_problem(const ToyConfig& cfg, std::string name) {
  Problem p;
  p.name = std::move(name);
  p.field = toy_field(cfg);
  p.u0 = Vector::Constant(1, cfg.u0);
  p.T = cfg.T;
  p.exact = [cfg](double eps, double t) { return Vector::Constant(1, toy_exact(cfg, eps, t)); };
  p.toy = cfg;
  return p;
}

inline Problem bloch_problem(const BlochConfig& cfg, std::string name) {
  Problem p;
  p.name = std::move(name);
  p.field = bloch_field(cfg);
  p.u0 = Vector(cfg.levels());
  for (Eigen::Index j = 0; j < cfg.levels(); ++j) p.u0[j] = cfg.rho_init[static_cast<std::size_t>(j)];
  p.T = cfg.T;
  p.time_scale_power = 2;
  p.bloch = cfg;
  return p;
}

/// Named presets: toy-1f, toy-3f (gamma = 0), toy-1f-g1, toy-3f-g1 (gamma = 1),
/// bloch-1f (with decaying part), bloch-3f (oscillating part only).
inline Problem make_preset(const std::string& name) {
  if (name == "toy-1f") return toy_problem(ToyConfig::one_frequency(0.0), name);
  if (name == "toy-3f") return toy_problem(ToyConfig::three_frequencies(0.0), name);
  if (name == "toy-1f-g1") return toy_problem(ToyConfig::one_frequency(1.0), name);
  if (name == "toy-3f-g1") return toy_problem(ToyConfig::three_frequencies(1.0), name);
  if (name == "bloch-1f") return bloch_problem(BlochConfig::one_frequency(), name);
  if (name == "bloch-3f") return bloch_problem(BlochConfig::three_frequencies(), name);
  throw ValidationError("unknown problem preset '" + name + "'");
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"toy-1f", "toy-3f", "toy-1f-g1", "toy-3f-g1", "bloch-1f", "bloch-3f"};
  return names;
}

/// Problem from a config object: {"preset": name} or
/// {"kind": "toy", "omega": [...], "gamma", "u0", "T"} or
/// {"kind": "bloch", "energies", "gamma": [[...]], "dipole": [[...]], "E0", "omega", "rho_init", "with_flat", "T"}.
inline Problem problem_from_json(const json& j) {
  if (j.is_string()) return make_preset(j.get<std::string>());
  if (j.contains("preset")) return make_preset(j.at("preset").get<std::string>());
  const std::string kind = j.at("kind").get<std::string>();
  const std::string name = j.value("name", kind);
  if (kind == "toy") {
    ToyConfig c;
    c.omega = j.at("omega").get<std::vector<double>>();
    c.gamma = j.value("gamma", 0.0);
    c.u0 = j.value("u0", 1.0);
    c.T = j.value("T", 10.0);
    return toy_problem(c, name);
  }
  if (kind == "bloch") {
    BlochConfig c;
    c.energies = j.at("energies").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(c.energies.size());
    const auto g = j.at("gamma").get<std::vector<std::vector<double>>>();
    const auto d = j.at("dipole").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(g.size()) != n || static_cast<Eigen::Index>(d.size()) != n)
      throw ValidationError("bloch config: gamma and dipole must be n x n");
    c.gamma.resize(n, n);
    c.dipole.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (static_cast<Eigen::Index>(g[a].size()) != n || static_cast<Eigen::Index>(d[a].size()) != n)
        throw ValidationError("bloch config: gamma and dipole must be n x n");
      for (Eigen::Index b = 0; b < n; ++b) {
        c.gamma(a, b) = g[a][b];
        c.dipole(a, b) = d[a][b];
      }
    }
    c.E0 = j.value("E0", 1.0);
    c.omega = j.at("omega").get<std::vector<double>>();
    c.rho_init = j.at("rho_init").get<std::vector<double>>();
    c.with_flat = j.value("with_flat", true);
    c.T = j.value("T", 10.0);
    return bloch_problem(c, name);
  }
  throw ValidationError("unknown problem kind '" + kind + "'");
}

}  // namespace mmavg
