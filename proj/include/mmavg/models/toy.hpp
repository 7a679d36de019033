#pragma once

#include "mmavg/engine/field.hpp"

#include <cmath>
#include <vector>

namespace mmavg {

/// Scalar problem du/dt = a_{t/eps} u with
/// a = -1 + (1/r) sum_p cos(omega_p tau) + gamma e^{-tau}.
struct ToyConfig {
  std::vector<double> omega{M_PI};
  double gamma = 0.0;
  double u0 = 1.0;
  double T = 10.0;

  static ToyConfig one_frequency(double gamma = 0.0) { return {{M_PI}, gamma, 1.0, 10.0}; }
  static ToyConfig three_frequencies(double gamma = 0.0) {
    return {{1.0, M_PI, std::sqrt(5.0) * M_PI}, gamma, 1.0, 10.0};
  }

  void validate() const {
    if (omega.empty()) throw ValidationError("toy: at least one frequency is needed");
    for (double w : omega)
      if (!(w != 0.0) || !std::isfinite(w)) throw ValidationError("toy: frequencies must be finite and nonzero");
    if (!(T > 0.0)) throw ValidationError("toy: T must be positive");
  }
};

/// Mono-frequency: c_D = |omega|, nu = 0. Several: nu = r - 1 and the
/// Diophantine constant measured over the mode cap.
inline FrequencyVector toy_frequencies(const ToyConfig& cfg) {
  cfg.validate();
  if (cfg.omega.size() == 1) return FrequencyVector::mono(cfg.omega[0]);
  return FrequencyVector::with_measured_constant(cfg.omega, static_cast<double>(cfg.omega.size() - 1));
}

/// b(tau) = (1/r) sum_p cos(omega_p tau).
inline ExpTrigPoly toy_oscillation(const FrequencyVector& f) {
  const double r = static_cast<double>(f.rank());
  ExpTrigPoly b(f, 1, 1);
  for (std::size_t p = 0; p < f.rank(); ++p) b = b + ExpTrigPoly::cos_mode(f, p, 1.0 / r);
  return b;
}

inline ExpTrigPoly toy_a(const ToyConfig& cfg) {
  const FrequencyVector f = toy_frequencies(cfg);
  ExpTrigPoly a = ExpTrigPoly::scalar(f, -1.0) + toy_oscillation(f);
  if (cfg.gamma != 0.0) a = a + ExpTrigPoly::term(f, MultiIndex(f.rank(), 0), -1.0, cfg.gamma);
  return a;
}

inline SharpFlatField toy_field(const ToyConfig& cfg, double mu = 1.0, int q = 3) {
  return SharpFlatField::make(toy_a(cfg), mu, q);
}

/// B(tau) = (1/r) sum_p sin(omega_p tau)/omega_p.
inline double toy_B(const ToyConfig& cfg, double tau) {
  double s = 0.0;
  for (double w : cfg.omega) s += std::sin(w * tau) / w;
  return s / static_cast<double>(cfg.omega.size());
}

/// u0 exp(-t + eps (B(t/eps) + gamma - gamma e^{-t/eps})).
inline double toy_exact(const ToyConfig& cfg, double eps, double t) {
  if (!(eps > 0.0)) throw DomainError("toy_exact: eps must be positive");
  const double tau = t / eps;
  return cfg.u0 * std::exp(-t + eps * (toy_B(cfg, tau) + cfg.gamma - cfg.gamma * std::exp(-tau)));
}

inline double toy_limit(const ToyConfig& cfg, double t) { return cfg.u0 * std::exp(-t); }

}  // namespace mmavg
