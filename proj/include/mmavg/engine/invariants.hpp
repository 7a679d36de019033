#pragma once

#include "mmavg/engine/decomposition.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace mmavg {

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Structural identities every decomposition must satisfy:
///  closure      Phi^(k) = id + eps (zero-mean terms) for every k
///  mean_defect  <delta> = 0
///  telescoping  eps P(delta) = Phi^(n) - Phi^(n+1)
///  homological  (1/eps) d_tau Phi - (a Phi - Phi A) = delta at the given eps
inline std::vector<InvariantCheck> check_invariants(const MicroMacroDecomposition& dec, const SharpFlatField& field,
                                                    double eps, double tol = 1e-12) {
  std::vector<InvariantCheck> out;
  auto add = [&](std::string name, double v, double t) { out.push_back({std::move(name), v, t, v <= t}); };
  const auto& f = field.freq();
  const Eigen::Index d = field.dim();
  const Mode zero{MultiIndex(f.rank(), 0), {}};

  double closure = 0.0;
  for (const auto& phi : dec.phis) {
    closure = std::max(closure, coefficient_distance(phi[0], ExpTrigPoly::identity(f, d)));
    for (std::size_t k = 1; k <= phi.degree(); ++k)
      if (const Matrix* m = phi[k].find(zero)) closure = std::max(closure, m->cwiseAbs().maxCoeff());
  }
  add("closure", closure, tol);

  add("mean_defect", average(dec.delta_at(eps)).cwiseAbs().maxCoeff(), tol);

  const auto n = static_cast<std::size_t>(dec.order);
  if (dec.phis.size() > n + 1) {
    const auto lhs = zero_mean_primitive(dec.delta).times_eps();
    add("telescoping", coefficient_distance(lhs, dec.phis[n] - dec.phis[n + 1]), tol);
  }

  const auto phi = dec.phi_at(eps);
  const auto res = cplx(1.0 / eps) * derivative(phi) - (field.a * phi - phi * dec.A_at(eps));
  add("homological", coefficient_distance(res, dec.delta_at(eps)), tol * std::max(1.0, field.M));
  return out;
}

}  // namespace mmavg
