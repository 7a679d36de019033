#pragma once

#include "mmavg/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace mmavg {

/// Fourier mode over the r base frequencies.
using MultiIndex = std::vector<int>;

inline int order_of(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) s += std::abs(a);
  return s;
}

inline bool is_zero(const MultiIndex& alpha) {
  return std::all_of(alpha.begin(), alpha.end(), [](int a) { return a == 0; });
}

/// Base angular frequencies together with their Diophantine constants
/// |alpha . omega| >= c_D / |alpha|^nu.
struct FrequencyVector {
  std::vector<double> omega;
  double c_D = 1.0;
  double nu = 0.0;
  double resonance_tol = 0.0;
  /// Largest |alpha| a polynomial may carry before operations abort.
  int max_order = 64;

  FrequencyVector() = default;
  FrequencyVector(std::vector<double> w, double cd, double nu_, double tol = -1.0, int cap = 64)
      : omega(std::move(w)), c_D(cd), nu(nu_), resonance_tol(tol), max_order(cap) {
    if (resonance_tol < 0.0) resonance_tol = default_tolerance(omega);
    validate();
  }

  /// r = 1 with the usual convention nu = 0 and c_D = |omega|.
  static FrequencyVector mono(double w, int cap = 64) {
    return FrequencyVector({w}, std::abs(w), 0.0, -1.0, cap);
  }

  /// Multi-frequency vector whose c_D is measured over all modes up to the
  /// mode cap, since no polynomial can carry a larger mode.
  static FrequencyVector with_measured_constant(std::vector<double> w, double nu, int cap = 64,
                                                int search_order = -1) {
    if (w.size() == 1) return mono(w[0], cap);
    const int k = search_order > 0 ? search_order : cap;
    const double tol = default_tolerance(w);
    const double cd = measure_diophantine(w, nu, k);
    if (!(cd > tol)) throw ResonanceError("frequency vector is resonant up to |alpha| <= " + std::to_string(k));
    return FrequencyVector(std::move(w), cd, nu, tol, cap);
  }

  static double default_tolerance(const std::vector<double>& w) {
    double m = 0.0;
    for (double x : w) m = std::max(m, std::abs(x));
    return 1e-10 * m;
  }

  /// min over 0 < |alpha| <= max_order of |alpha . omega| |alpha|^nu.
  static double measure_diophantine(const std::vector<double>& w, double nu, int max_order) {
    double best = std::numeric_limits<double>::infinity();
    MultiIndex alpha(w.size(), 0);
    // Enumerate the l1 ball of radius max_order.
    std::function<void(std::size_t, int, double)> rec = [&](std::size_t p, int budget, double dot) {
      if (p + 1 == w.size()) {
        for (int a = -budget; a <= budget; ++a) {
          alpha[p] = a;
          const int ord = order_of(alpha);
          if (ord == 0) continue;
          const double val = std::abs(dot + a * w[p]) * std::pow(static_cast<double>(ord), nu);
          best = std::min(best, val);
        }
        return;
      }
      for (int a = -budget; a <= budget; ++a) {
        alpha[p] = a;
        rec(p + 1, budget - std::abs(a), dot + a * w[p]);
      }
    };
    rec(0, max_order, 0.0);
    return best;
  }

  std::size_t rank() const { return omega.size(); }

  double dot(const MultiIndex& alpha) const {
    double s = 0.0;
    for (std::size_t p = 0; p < omega.size(); ++p) s += alpha[p] * omega[p];
    return s;
  }

  void validate() const {
    if (omega.empty()) throw ValidationError("frequency vector must have r >= 1");
    for (double w : omega)
      if (!(w != 0.0) || !std::isfinite(w)) throw ValidationError("frequencies must be finite and nonzero");
    if (!(c_D > 0.0)) throw ValidationError("Diophantine constant c_D must be positive");
    if (nu < 0.0) throw ValidationError("Diophantine exponent nu must be >= 0");
    if (omega.size() == 1 && (nu != 0.0 || std::abs(c_D - std::abs(omega[0])) > 1e-15 * std::abs(omega[0])))
      throw ValidationError("mono-frequency vectors use nu = 0 and c_D = |omega|");
    if (!(resonance_tol > 0.0)) throw ValidationError("resonance_tol must be positive");
    if (max_order < 1) throw ValidationError("max_order must be >= 1");
  }

  friend bool operator==(const FrequencyVector& a, const FrequencyVector& b) {
    return a.omega == b.omega && a.c_D == b.c_D && a.nu == b.nu &&
           a.resonance_tol == b.resonance_tol && a.max_order == b.max_order;
  }
};

/// Integration constant c_I(kappa) bounding zero-mean primitives between
/// analyticity widths separated by kappa.
inline double integration_constant(const FrequencyVector& f, double kappa) {
  if (f.nu == 0.0) return std::max(1.0, 1.0 / f.c_D);
  if (!(kappa > 0.0)) throw DomainError("c_I(kappa) needs kappa > 0 when nu > 0");
  return std::max(1.0, std::pow(f.nu / (kappa * std::exp(1.0)), f.nu) / f.c_D);
}

}  // namespace mmavg
