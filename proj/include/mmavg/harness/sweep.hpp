#pragma once

#include "mmavg/engine/decomposition.hpp"
#include "mmavg/harness/fit.hpp"
#include "mmavg/harness/records.hpp"
#include "mmavg/integrators/solve.hpp"
#include "mmavg/models/problem.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace mmavg {

enum class SweepMode { micro_macro, direct, macro_only };
enum class ReferenceKind { exact, fine_EEint };

inline std::string to_string(SweepMode m) {
  switch (m) {
    case SweepMode::micro_macro: return "micro_macro";
    case SweepMode::direct: return "direct";
    case SweepMode::macro_only: return "macro_only";
  }
  return "?";
}

inline SweepMode sweep_mode_from_string(const std::string& s) {
  if (s == "micro_macro") return SweepMode::micro_macro;
  if (s == "direct") return SweepMode::direct;
  if (s == "macro_only") return SweepMode::macro_only;
  throw ValidationError("unknown mode '" + s + "'");
}

/// Geometric grid from `from` to `to` with `count` points (both ends included).
inline std::vector<double> geometric_grid(double from, double to, int count) {
  if (count < 1 || !(from > 0.0) || !(to > 0.0)) throw ValidationError("geometric grid needs count >= 1 and positive ends");
  std::vector<double> g;
  for (int k = 0; k < count; ++k)
    g.push_back(count == 1 ? from : from * std::pow(to / from, static_cast<double>(k) / (count - 1)));
  return g;
}

struct SweepConfig {
  json problem = "toy-3f";
  int order = 1;
  double c = 0.5;
  Scheme scheme = Scheme::EE;
  SweepMode mode = SweepMode::micro_macro;
  std::vector<long> steps;  ///< L values, dt = T/L
  std::vector<double> eps;  ///< user-facing eps (the fast time is t/eps^s)
  ReferenceKind reference = ReferenceKind::exact;
  double dt_ref = 5e-6;
  double reference_accuracy = -1.0;  ///< < 0: 1e-13 for exact, 1e-5 for fine_EEint
  bool record_timing = false;

  /// dt = T/2^4 ... T/2^14 and 13 eps values from 0.5 down to 1e-4.
  static std::vector<long> default_steps() {
    std::vector<long> s;
    for (int k = 4; k <= 14; ++k) s.push_back(1L << k);
    return s;
  }
  static std::vector<double> default_eps() { return geometric_grid(0.5, 1e-4, 13); }

  double accuracy() const {
    if (reference_accuracy >= 0.0) return reference_accuracy;
    return reference == ReferenceKind::exact ? 1e-13 : 1e-5;
  }

  void validate(const Problem& p) const {
    if (eps.empty()) throw ValidationError("sweep: eps grid is empty");
    if (steps.empty()) throw ValidationError("sweep: dt grid is empty");
    for (double e : eps)
      if (!(e > 0.0)) throw ValidationError("sweep: eps values must be positive");
    for (long L : steps)
      if (L < 1) throw ValidationError("sweep: step counts must be >= 1");
    if (mode != SweepMode::direct && order < 0) throw ValidationError("sweep: order must be >= 0");
    if (reference == ReferenceKind::exact && !p.exact)
      throw ValidationError("sweep: problem '" + p.name + "' has no exact solution; use fine_EEint");
    if (reference == ReferenceKind::fine_EEint) {
      const long Lmax = *std::max_element(steps.begin(), steps.end());
      if (dt_ref * 10.0 > p.T / static_cast<double>(Lmax) * (1.0 + 1e-12))
        throw ValidationError("sweep: dt_ref must be at least 10x smaller than the smallest dt");
    }
  }
};

/// Converts a dt list to step counts; each T/dt must be an integer.
inline std::vector<long> steps_from_dt(const std::vector<double>& dts, double T) {
  std::vector<long> out;
  for (double dt : dts) {
    if (!(dt > 0.0)) throw ValidationError("dt must be positive");
    const double L = T / dt;
    const long Li = std::lround(L);
    if (Li < 1 || std::abs(L - static_cast<double>(Li)) > 1e-9 * L)
      throw ValidationError("dt = " + format_double(dt) + " does not divide T");
    out.push_back(Li);
  }
  return out;
}

inline SweepConfig sweep_config_from_json(const json& j) {
  SweepConfig c;
  c.problem = j.value("problem", json("toy-3f"));
  c.order = j.value("order", 1);
  c.c = j.value("c", 0.5);
  c.scheme = scheme_from_string(j.value("scheme", std::string("EE")));
  c.mode = sweep_mode_from_string(j.value("mode", std::string("micro_macro")));
  const std::string ref = j.value("reference", std::string("exact"));
  if (ref == "exact")
    c.reference = ReferenceKind::exact;
  else if (ref == "fine_EEint")
    c.reference = ReferenceKind::fine_EEint;
  else
    throw ValidationError("unknown reference '" + ref + "'");
  c.dt_ref = j.value("dt_ref", 5e-6);
  c.reference_accuracy = j.value("reference_accuracy", -1.0);
  c.record_timing = j.value("record_timing", false);
  if (j.contains("eps")) {
    c.eps = j.at("eps").get<std::vector<double>>();
  } else if (j.contains("eps_grid")) {
    const auto& g = j.at("eps_grid");
    c.eps = geometric_grid(g.at("from").get<double>(), g.at("to").get<double>(), g.at("count").get<int>());
  } else {
    c.eps = SweepConfig::default_eps();
  }
  if (j.contains("steps")) {
    c.steps = j.at("steps").get<std::vector<long>>();
  } else if (j.contains("dt")) {
    c.steps = steps_from_dt(j.at("dt").get<std::vector<double>>(), problem_from_json(c.problem).T);
  } else {
    c.steps = SweepConfig::default_steps();
  }
  return c;
}

/// Reference solution on [0, T] at one eps: either a closed form or a fine
/// direct EEint run stored every `stride` steps.
struct Reference {
  double T = 0.0;
  long steps = 0;
  long stride = 1;
  std::vector<Vector> values;
  std::function<Vector(double)> exact;
  double accuracy = 0.0;

  /// Value at step l of a grid with L steps.
  Vector at(long l, long L) const {
    if (exact) return exact(static_cast<double>(l) * (T / static_cast<double>(L)));
    if (steps % L != 0) throw ValidationError("reference grid: L does not divide L_ref");
    const long lr = l * (steps / L);
    if (lr % stride != 0) throw ValidationError("reference grid: point not stored");
    return values.at(static_cast<std::size_t>(lr / stride));
  }
};

inline Reference exact_reference(const Problem& p, double eps, double accuracy = 1e-13) {
  if (!p.exact) throw ValidationError("problem has no exact solution");
  Reference r;
  r.T = p.T;
  r.exact = [f = p.exact, eps](double t) { return f(eps, t); };
  r.accuracy = accuracy;
  return r;
}

/// Direct EEint with step dt_ref, keeping every point any L in `steps` needs.
inline Reference fine_reference(const Problem& p, double eps, double dt_ref, const std::vector<long>& steps,
                                double accuracy = 1e-5) {
  const double Lr = p.T / dt_ref;
  const long L_ref = std::lround(Lr);
  if (L_ref < 1 || std::abs(Lr - static_cast<double>(L_ref)) > 1e-9 * Lr)
    throw ValidationError("dt_ref does not divide T");
  long stride = 0;
  for (long L : steps) {
    if (L_ref % L != 0)
      throw ValidationError("L = " + std::to_string(L) + " does not divide L_ref = " + std::to_string(L_ref));
    stride = std::gcd(stride, L_ref / L);
  }
  if (stride == 0) stride = L_ref;
  const Trajectory tr = solve_direct(p.field, p.u0, p.T, L_ref, p.engine_eps(eps), Scheme::EEint, stride);
  if (tr.blowup) throw Error("reference solution blew up");
  Reference r;
  r.T = p.T;
  r.steps = L_ref;
  r.stride = stride;
  r.values = tr.u;
  r.accuracy = accuracy;
  return r;
}

/// max over stored points of |u^l - u_ref(t^l)| (l1 norm); +inf on blowup.
inline double compute_error(const Trajectory& tr, const Reference& ref, bool macro_only = false) {
  if (tr.blowup) return std::numeric_limits<double>::infinity();
  if (macro_only && tr.direct) throw ValidationError("macro-only error needs a micro-macro trajectory");
  const auto& u = macro_only ? tr.u_macro : tr.u;
  double e = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) e = std::max(e, l1norm(u[k] - ref.at(tr.index[k], tr.steps)));
  return e;
}

/// Error between two sampled solutions on the same grid.
inline double compute_error(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) throw ValidationError("compute_error: grids do not align");
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) throw DimensionError("compute_error: dimension mismatch");
    e = std::max(e, l1norm(a[k] - b[k]));
  }
  return e;
}

inline double min_population(const Trajectory& tr, bool macro_only = false) {
  const auto& u = macro_only ? tr.u_macro : tr.u;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& x : u)
    for (Eigen::Index j = 0; j < x.size(); ++j) m = std::min(m, x[j].real());
  return m;
}

/// Fine references keyed by eps, shared between sweeps over the same problem and dt grid.
using ReferenceCache = std::map<double, Reference>;

/// Full (eps, dt) product for one scheme. Records come out sorted by eps then dt.
/// Pass a prebuilt decomposition to skip the construction.
inline std::vector<ErrorRecord> run_sweep(const SweepConfig& cfg, const Problem& p,
                                          const MicroMacroDecomposition* prebuilt = nullptr,
                                          ReferenceCache* cache = nullptr) {
  cfg.validate(p);
  std::optional<MicroMacroDecomposition> own;
  const MicroMacroDecomposition* dec = prebuilt;
  if (cfg.mode != SweepMode::direct && !dec) {
    own = iterate(p.field, cfg.order, cfg.c);
    dec = &*own;
  }
  std::vector<double> eps = cfg.eps;
  std::sort(eps.begin(), eps.end());
  std::vector<long> steps = cfg.steps;
  std::sort(steps.begin(), steps.end(), std::greater<>());  // ascending dt

  std::vector<ErrorRecord> out;
  for (double e : eps) {
    Reference local;
    const Reference* found = nullptr;
    if (cfg.reference == ReferenceKind::exact) {
      local = exact_reference(p, e, cfg.accuracy());
    } else if (cache && cache->count(e)) {
      found = &cache->at(e);
    } else {
      local = fine_reference(p, e, cfg.dt_ref, steps, cfg.accuracy());
      if (cache) found = &cache->emplace(e, std::move(local)).first->second;
    }
    const Reference& ref = found ? *found : local;
    const double ee = p.engine_eps(e);
    for (long L : steps) {
      const auto t0 = std::chrono::steady_clock::now();
      const Trajectory tr = cfg.mode == SweepMode::direct
                                ? solve_direct(p.field, p.u0, p.T, L, ee, cfg.scheme)
                                : solve_micro_macro(*dec, p.field, p.u0, p.T, L, ee, cfg.scheme);
      const bool macro = cfg.mode == SweepMode::macro_only;
      ErrorRecord r;
      r.problem = p.name;
      r.scheme = to_string(cfg.scheme);
      r.order = cfg.mode == SweepMode::direct ? -1 : cfg.order;
      r.eps = e;
      r.dt = p.T / static_cast<double>(L);
      r.error = compute_error(tr, ref, macro);
      if (cfg.record_timing)
        r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (tr.blowup) r.flags.push_back("blowup");
      if (cfg.mode != SweepMode::direct) {
        if (tr.eps_exceeds_threshold) r.flags.push_back("eps_gt_eps_n");
        if (cfg.order < required_order(cfg.scheme)) r.flags.push_back("s_gt_n");
      }
      if (p.bloch && !tr.blowup) {
        r.min_population = min_population(tr, macro);
        if (r.min_population < 0.0) r.flags.push_back("negative_population");
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline std::vector<ErrorRecord> run_sweep(const SweepConfig& cfg) {
  return run_sweep(cfg, problem_from_json(cfg.problem));
}

}  // namespace mmavg
