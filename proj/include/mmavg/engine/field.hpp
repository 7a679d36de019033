#pragma once

#include "mmavg/etp/poly.hpp"

#include <algorithm>
#include <optional>

namespace mmavg {

/// Forcing tau -> a_tau together with the bound data the averaging
/// estimates are stated in: width mu, size M >= N_mu(a), smoothness budget q
/// and C_a with sup_{p<=q} ||d^p a|| <= C_a M.
struct SharpFlatField {
  ExpTrigPoly a;
  double mu = 1.0;
  double M = 0.0;
  int q = 3;
  double C_a_q = 0.0;
  double flat_rate = 0.0;

  Eigen::Index dim() const { return a.rows(); }
  const FrequencyVector& freq() const { return a.freq(); }

  /// Fills M (unless given) and C_a from the coefficients of a.
  static SharpFlatField make(ExpTrigPoly a, double mu = 1.0, int q = 3, std::optional<double> M = {}) {
    if (a.rows() != a.cols()) throw DimensionError("field must be square");
    if (!(mu > 0.0)) throw ValidationError("mu must be positive");
    if (q < 0) throw ValidationError("q must be >= 0");
    SharpFlatField f;
    f.mu = mu;
    f.q = q;
    const double n_mu = norm_kappa(a, mu);
    f.M = M.value_or(n_mu);
    if (f.M < n_mu * (1.0 - 1e-14)) throw ValidationError("M must bound N_mu(a)");
    if (!(f.M > 0.0)) {
      // The zero field: any positive M works.
      f.M = 1.0;
    }
    double worst = 0.0;
    for (int p = 0; p <= q; ++p) worst = std::max(worst, norm_kappa(derivative(a, p), 0.0));
    f.C_a_q = worst / f.M;
    f.flat_rate = mmavg::flat_rate(a);
    f.a = std::move(a);
    return f;
  }
};

}  // namespace mmavg
