#pragma once

#include "mmavg/engine/eps_poly.hpp"
#include "mmavg/engine/field.hpp"

#include <vector>

namespace mmavg {

/// Constants entering the admissibility threshold eps_n.
struct DecompositionConstants {
  double c = 0.5;
  double N_c = 0.0;  ///< (2 + c)(1 + c)
  double L_c = 0.0;  ///< 3 + 2c
  double c_I = 0.0;  ///< c_I(mu_n)
  double mu = 1.0;
  double mu_n = 1.0;
  double M = 0.0;
  std::vector<double> mu_ladder;  ///< mu_k = (1 - k/(n+1)) mu, k = 0..n+1
};

/// Near-identity maps Phi^(0..n+1), averaged field A^(n) and defect delta^(n),
/// all stored as polynomials in eps.
struct MicroMacroDecomposition {
  int order = 0;
  std::vector<EpsPoly> phis;
  MatrixEpsPoly A;
  EpsPoly delta;
  double eps_n = 0.0;
  DecompositionConstants constants;

  const EpsPoly& phi() const { return phis.at(static_cast<std::size_t>(order)); }
  ExpTrigPoly phi_at(double eps) const { return phi().at(eps); }
  ExpTrigPoly delta_at(double eps) const { return delta.at(eps); }
  Matrix A_at(double eps) const { return A.at(eps); }
  Eigen::Index dim() const { return phi().rows(); }
};

inline DecompositionConstants decomposition_constants(const SharpFlatField& field, int n, double c) {
  if (n < 0) throw ValidationError("order must be >= 0");
  if (!(c > 0.0 && c < 1.0)) throw ValidationError("contraction parameter c must lie in (0, 1)");
  DecompositionConstants k;
  k.c = c;
  k.N_c = (2.0 + c) * (1.0 + c);
  k.L_c = 3.0 + 2.0 * c;
  k.mu = field.mu;
  k.mu_n = field.mu / (n + 1);
  k.c_I = integration_constant(field.freq(), k.mu_n);
  k.M = field.M;
  for (int j = 0; j <= n + 1; ++j) k.mu_ladder.push_back((1.0 - static_cast<double>(j) / (n + 1)) * field.mu);
  return k;
}

/// eps_n = c / (c_I(mu_n) N_c M).
inline double epsilon_threshold(const SharpFlatField& field, int n, double c = 0.5) {
  const auto k = decomposition_constants(field, n, c);
  return c / (k.c_I * k.N_c * k.M);
}

/// Lambda{phi} = a phi - phi <a phi>, valid under the closure <phi> = id.
inline ExpTrigPoly lambda_op(const ExpTrigPoly& phi, const SharpFlatField& field, double closure_tol = 1e-12) {
  const Matrix mean = average(phi);
  if (mean.rows() != mean.cols() ||
      (mean - Matrix::Identity(mean.rows(), mean.cols())).cwiseAbs().maxCoeff() > closure_tol)
    throw ClosureError("lambda_op: <phi> differs from the identity");
  const ExpTrigPoly aphi = field.a * phi;
  return aphi - phi * average(aphi);
}

/// Lambda applied to an eps-polynomial map; the closure is checked per power.
inline EpsPoly lambda_op(const EpsPoly& phi, const SharpFlatField& field, double closure_tol = 1e-12) {
  const auto mean = average(phi);
  for (std::size_t k = 0; k < mean.coeffs.size(); ++k) {
    Matrix target = Matrix::Zero(phi.rows(), phi.cols());
    if (k == 0) target.setIdentity();
    if ((mean.coeffs[k] - target).cwiseAbs().maxCoeff() > closure_tol)
      throw ClosureError("lambda_op: <phi> differs from the identity");
  }
  const EpsPoly aphi = field.a * phi;
  return aphi - phi * average(aphi);
}

/// Standard-averaging fixed point Phi^(k+1) = id + eps P(Lambda{Phi^(k)}),
/// run to order n, with A^(n) = <a Phi^(n)> and
/// delta^(n) = Lambda{Phi^(n-1)} - Lambda{Phi^(n)}.
inline MicroMacroDecomposition iterate(const SharpFlatField& field, int n, double c = 0.5) {
  MicroMacroDecomposition dec;
  dec.order = n;
  dec.constants = decomposition_constants(field, n, c);
  dec.eps_n = c / (dec.constants.c_I * dec.constants.N_c * dec.constants.M);

  const auto& f = field.freq();
  const Eigen::Index d = field.dim();
  const EpsPoly id(ExpTrigPoly::identity(f, d));

  dec.phis.push_back(id);
  EpsPoly lam_prev = EpsPoly::zero(f, d, d);
  EpsPoly lam_curr = EpsPoly::zero(f, d, d);
  for (int k = 0; k <= n; ++k) {
    EpsPoly lam = lambda_op(dec.phis.back(), field);
    dec.phis.push_back(id + zero_mean_primitive(lam).times_eps());
    if (k == n - 1) lam_prev = lam;
    if (k == n) lam_curr = std::move(lam);
  }
  dec.A = average(field.a * dec.phi());
  dec.delta = lam_prev - lam_curr;
  return dec;
}

}  // namespace mmavg
