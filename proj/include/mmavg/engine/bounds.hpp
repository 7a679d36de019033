#pragma once

#include "mmavg/engine/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mmavg {

struct BoundCheck {
  std::string name;
  double grid = 0.0;       ///< sup over the sampling grid (lower estimate of the sup)
  double certified = 0.0;  ///< coefficient-sum upper bound
  double rhs = 0.0;
  bool pass = false;
};

struct BoundsReport {
  double eps = 0.0;
  double eps_n = 0.0;
  int order = 0;
  int q = 0;
  std::vector<BoundCheck> checks;
  double c_q = 0.0;             ///< measured max_k sup_{p<=q} ||d^p Phi^(k)||
  double C_delta_bound = 0.0;   ///< C_a (eps_n L_c^(q) M)^n built from c_q
  double C_delta_measured = 0.0;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.pass; });
  }
};

/// Sampling grid: 4096 points over one quasi-period estimate 2 pi / min|omega|
/// and 4096 points over [0, 20] for the flat decay.
inline std::vector<double> bounds_grid(const FrequencyVector& f, int points = 4096) {
  double wmin = std::abs(f.omega.front());
  for (double w : f.omega) wmin = std::min(wmin, std::abs(w));
  const double period = 2.0 * M_PI / wmin;
  std::vector<double> g;
  g.reserve(2 * static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g.push_back(period * k / (points - 1));
  for (int k = 0; k < points; ++k) g.push_back(20.0 * k / (points - 1));
  return g;
}

inline double grid_sup(const ExpTrigPoly& p, const std::vector<double>& grid, const Matrix* shift = nullptr) {
  double s = 0.0;
  for (double tau : grid) {
    Matrix v = evaluate(p, tau);
    if (shift) v -= *shift;
    s = std::max(s, opnorm(v));
  }
  return s;
}

/// Checks the order-n estimates at a given eps:
///   ||Phi - id|| <= c eps/eps_n,  |A| <= (1 + c) M,  ||delta|| <= M (eps/eps_n)^n,
///   sup |eps int_0^tau delta| <= (eps/eps_n)^(n+1),
///   sup_{p<=q} ||d^p delta|| <= C_delta M (eps/eps_n)^n.
inline BoundsReport verify_bounds(const MicroMacroDecomposition& dec, const SharpFlatField& field, double eps) {
  if (!(eps >= 0.0)) throw ValidationError("eps must be >= 0");
  if (eps > dec.eps_n * (1.0 + 1e-14)) throw DomainError("verify_bounds: eps exceeds eps_n");
  const auto& k = dec.constants;
  const int n = dec.order;
  const int q = field.q;
  const double ratio = eps / dec.eps_n;
  const double M = k.M;
  const auto grid = bounds_grid(field.freq());
  const auto tol = [](double rhs) { return rhs * (1.0 + 1e-12) + 1e-300; };

  BoundsReport r;
  r.eps = eps;
  r.eps_n = dec.eps_n;
  r.order = n;
  r.q = q;

  const Eigen::Index d = dec.dim();
  const ExpTrigPoly phi = dec.phi_at(eps);
  const ExpTrigPoly phi_minus_id = phi - ExpTrigPoly::identity(field.freq(), d);
  const ExpTrigPoly delta = dec.delta_at(eps);

  auto add = [&](std::string name, double grid_val, double cert, double rhs) {
    BoundCheck c{std::move(name), grid_val, cert, rhs, false};
    c.pass = std::min(grid_val, cert) <= tol(rhs);
    r.checks.push_back(std::move(c));
  };

  add("phi_minus_id", grid_sup(phi_minus_id, grid), norm_kappa(phi_minus_id, 0.0), k.c * ratio);
  const double a_norm = opnorm(dec.A_at(eps));
  add("averaged_field", a_norm, a_norm, (1.0 + k.c) * M);
  add("defect", grid_sup(delta, grid), norm_kappa(delta, 0.0), M * std::pow(ratio, n));

  const ExpTrigPoly prim = zero_mean_primitive(delta);
  const Matrix p0 = evaluate(prim, 0.0);
  add("defect_integral", eps * grid_sup(prim, grid, &p0), 2.0 * eps * norm_kappa(prim, 0.0), std::pow(ratio, n + 1));

  double c_q = 0.0;
  for (int j = 0; j <= n; ++j) {
    const ExpTrigPoly pj = dec.phis[static_cast<std::size_t>(j)].at(eps);
    for (int p = 0; p <= q; ++p) c_q = std::max(c_q, norm_kappa(derivative(pj, p), 0.0));
  }
  double sup_grid = 0.0, sup_cert = 0.0;
  for (int p = 0; p <= q; ++p) {
    const ExpTrigPoly dp = derivative(delta, p);
    sup_grid = std::max(sup_grid, grid_sup(dp, grid));
    sup_cert = std::max(sup_cert, norm_kappa(dp, 0.0));
  }
  const double L_q = std::pow(2.0, q) * field.C_a_q + 1.0 + k.c + c_q;
  r.c_q = c_q;
  r.C_delta_bound = field.C_a_q * std::pow(dec.eps_n * L_q * M, n);
  const double scale = M * std::pow(ratio, n);
  r.C_delta_measured = scale > 0.0 ? std::min(sup_grid, sup_cert) / scale : 0.0;
  add("defect_derivatives", sup_grid, sup_cert, r.C_delta_bound * scale);
  return r;
}

}  // namespace mmavg
