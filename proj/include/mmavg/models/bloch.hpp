#pragma once

#include "mmavg/engine/field.hpp"

#include <cmath>
#include <vector>

namespace mmavg {

/// Population rate model driven by V(tau) = (E0/r) sum_p cos(omega_p tau)
/// with dipole matrix p, relaxation gamma and level energies E.
struct BlochConfig {
  std::vector<double> energies{0.0, 2.0, 3.0};
  Eigen::MatrixXd gamma;
  Matrix dipole;
  double E0 = 1.0;
  std::vector<double> omega{M_PI};
  std::vector<double> rho_init{0.0, 0.0, 1.0};
  bool with_flat = true;
  double T = 10.0;

  Eigen::Index levels() const { return static_cast<Eigen::Index>(energies.size()); }

  /// Three levels E = (0, 2, 3), gamma_jk = p_jk = 1 - delta_jk, rho(0) = (0, 0, 1).
  static BlochConfig preset(std::vector<double> omega, bool with_flat) {
    BlochConfig c;
    c.omega = std::move(omega);
    c.with_flat = with_flat;
    c.gamma = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    c.dipole = c.gamma.cast<cplx>();
    return c;
  }
  static BlochConfig one_frequency() { return preset({M_PI}, true); }
  static BlochConfig three_frequencies() { return preset({1.0, M_PI, std::sqrt(5.0) * M_PI}, false); }

  void validate() const {
    const Eigen::Index n = levels();
    if (n < 2) throw ValidationError("bloch: at least two levels are needed");
    if (gamma.rows() != n || gamma.cols() != n || dipole.rows() != n || dipole.cols() != n)
      throw ValidationError("bloch: gamma and dipole must be n x n");
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        if (j == k && gamma(j, k) != 0.0) throw ValidationError("bloch: gamma must vanish on the diagonal");
        if (j != k && !(gamma(j, k) > 0.0)) throw ValidationError("bloch: off-diagonal gamma must be positive");
        if (gamma(j, k) != gamma(k, j)) throw ValidationError("bloch: gamma must be symmetric");
        if (std::abs(dipole(j, k) - std::conj(dipole(k, j))) > 1e-14 * (1.0 + std::abs(dipole(j, k))))
          throw ValidationError("bloch: dipole matrix must be Hermitian");
      }
    if (omega.empty()) throw ValidationError("bloch: at least one frequency is needed");
    if (static_cast<Eigen::Index>(rho_init.size()) != n) throw ValidationError("bloch: rho_init has the wrong length");
    double s = 0.0;
    for (double x : rho_init) {
      if (x < 0.0) throw ValidationError("bloch: initial populations must be nonnegative");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-12) throw ValidationError("bloch: initial populations must sum to 1");
    if (!(T > 0.0)) throw ValidationError("bloch: T must be positive");
  }

  /// Omega_lj = -i (E_l - E_j) - gamma_lj.
  cplx Omega(Eigen::Index l, Eigen::Index j) const {
    return cplx(-gamma(l, j), -(energies[static_cast<std::size_t>(l)] - energies[static_cast<std::size_t>(j)]));
  }
};

struct RS {
  double R = 0.0;
  double S = 0.0;
};

/// R = Re(omega e^{Omega tau}/(omega^2 + Omega^2)), S = -Re(Omega e^{Omega tau}/(omega^2 + Omega^2)).
inline RS bloch_RS(double tau, double omega, cplx Omega) {
  const cplx den = omega * omega + Omega * Omega;
  if (std::abs(den) <= 1e-14 * (omega * omega + std::norm(Omega)))
    throw ResonanceError("bloch_RS: omega^2 + Omega^2 vanishes (undamped resonance)");
  const cplx e = std::exp(Omega * tau);
  return {(omega * e / den).real(), -(Omega * e / den).real()};
}

inline FrequencyVector bloch_frequencies(const BlochConfig& cfg) {
  if (cfg.omega.size() == 1) return FrequencyVector::mono(cfg.omega[0]);
  return FrequencyVector::with_measured_constant(cfg.omega, static_cast<double>(cfg.omega.size() - 1));
}

namespace detail {

/// Scalar Psi_lj polynomial (sharp part, plus the flat part if requested).
inline ExpTrigPoly bloch_psi_entry(const BlochConfig& cfg, const FrequencyVector& f, Eigen::Index l, Eigen::Index j,
                                   bool with_flat) {
  const std::size_t r = cfg.omega.size();
  const double pre = 2.0 * cfg.E0 * cfg.E0 / static_cast<double>(r * r) * std::norm(cfg.dipole(l, j));
  const cplx Om = cfg.Omega(l, j);
  ExpTrigPoly sharp(f, 1, 1);
  std::vector<ExpTrigTerm> flat;
  for (std::size_t p1 = 0; p1 < r; ++p1) {
    const ExpTrigPoly c1 = ExpTrigPoly::cos_mode(f, p1);
    for (std::size_t p2 = 0; p2 < r; ++p2) {
      const RS rs = bloch_RS(0.0, cfg.omega[p2], Om);
      sharp = sharp + c1 * (ExpTrigPoly::sin_mode(f, p2, rs.R) + ExpTrigPoly::cos_mode(f, p2, rs.S));
      if (!with_flat) continue;
      // -cos(w1 tau) S(tau) = (1/4) sum_{+-} (z e^{(Om +- i w1) tau} + conj(z) e^{(conj(Om) +- i w1) tau})
      const cplx z = Om / (cfg.omega[p2] * cfg.omega[p2] + Om * Om);
      for (int sgn : {1, -1}) {
        MultiIndex alpha(f.rank(), 0);
        alpha[p1] = sgn;
        flat.push_back({Mode{alpha, Om}, Matrix::Constant(1, 1, 0.25 * pre * z)});
        flat.push_back({Mode{alpha, std::conj(Om)}, Matrix::Constant(1, 1, 0.25 * pre * std::conj(z))});
      }
    }
  }
  ExpTrigPoly psi = cplx(pre) * sharp;
  if (with_flat) psi = psi + ExpTrigPoly(f, 1, 1, std::move(flat));
  return psi;
}

}  // namespace detail

/// Matrix polynomial of the transition rates Psi_lj (zero diagonal). Entries are
/// built for l < j and mirrored, so Psi is symmetric by construction.
inline ExpTrigPoly bloch_psi(const BlochConfig& cfg, bool with_flat) {
  cfg.validate();
  const FrequencyVector f = bloch_frequencies(cfg);
  const Eigen::Index n = cfg.levels();
  ExpTrigPoly psi(f, n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = l + 1; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(l, j) = e(j, l) = 1.0;
      psi = psi + outer(detail::bloch_psi_entry(cfg, f, l, j, with_flat), e);
    }
  return psi;
}

inline ExpTrigPoly bloch_psi(const BlochConfig& cfg) { return bloch_psi(cfg, true); }
inline ExpTrigPoly bloch_psi_inf(const BlochConfig& cfg) { return bloch_psi(cfg, false); }

/// <Psi>_lj = (E0^2/r^2) |p_lj|^2 sum_p S(0, omega_p, Omega_lj).
inline Matrix bloch_psi_average(const BlochConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = cfg.levels();
  const double r = static_cast<double>(cfg.omega.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (l == j) continue;
      double s = 0.0;
      for (double w : cfg.omega) s += bloch_RS(0.0, w, cfg.Omega(l, j)).S;
      m(l, j) = cfg.E0 * cfg.E0 / (r * r) * std::norm(cfg.dipole(l, j)) * s;
    }
  return m;
}

/// Rate matrix a_jk = Psi_kj (j != k), a_jj = -sum_{l != j} Psi_lj.
inline ExpTrigPoly bloch_rate_matrix(const ExpTrigPoly& psi) {
  if (psi.rows() != psi.cols()) throw DimensionError("bloch_rate_matrix: Psi must be square");
  const Eigen::Index n = psi.rows();
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : psi.terms()) {
    Matrix c = t.coeff.transpose();
    c.diagonal().setZero();
    for (Eigen::Index j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (Eigen::Index l = 0; l < n; ++l)
        if (l != j) s += t.coeff(l, j);
      c(j, j) = -s;
    }
    terms.push_back({t.mode, std::move(c)});
  }
  return ExpTrigPoly(psi.freq(), n, n, std::move(terms));
}

inline SharpFlatField bloch_rate_field(const ExpTrigPoly& psi, double mu = 1.0, int q = 3) {
  return SharpFlatField::make(bloch_rate_matrix(psi), mu, q);
}

inline SharpFlatField bloch_field(const BlochConfig& cfg, double mu = 1.0, int q = 3) {
  return bloch_rate_field(bloch_psi(cfg, cfg.with_flat), mu, q);
}

/// Monochromatic closed form (E0^2 |p_lj|^2/omega)(sin^2 R_lj + sin cos S_lj).
inline ExpTrigPoly bloch_upsilon_inf(const BlochConfig& cfg) {
  cfg.validate();
  if (cfg.omega.size() != 1) throw ValidationError("bloch_upsilon_inf: monochromatic wave required");
  const FrequencyVector f = bloch_frequencies(cfg);
  const double w = cfg.omega[0];
  const ExpTrigPoly s = ExpTrigPoly::sin_mode(f, 0), c = ExpTrigPoly::cos_mode(f, 0);
  const Eigen::Index n = cfg.levels();
  ExpTrigPoly ups(f, n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (l == j) continue;
      const RS rs = bloch_RS(0.0, w, cfg.Omega(l, j));
      const double pre = cfg.E0 * cfg.E0 * std::norm(cfg.dipole(l, j)) / w;
      Matrix e = Matrix::Zero(n, n);
      e(l, j) = 1.0;
      ups = ups + outer(cplx(pre) * (cplx(rs.R) * (s * s) + cplx(rs.S) * (s * c)), e);
    }
  return ups;
}

/// <Upsilon>_lj = E0^2 |p_lj|^2 R_lj / (2 omega).
inline Matrix bloch_upsilon_average(const BlochConfig& cfg) {
  if (cfg.omega.size() != 1) throw ValidationError("bloch_upsilon_average: monochromatic wave required");
  const Eigen::Index n = cfg.levels();
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index j = 0; j < n; ++j)
      if (l != j)
        m(l, j) = cfg.E0 * cfg.E0 * std::norm(cfg.dipole(l, j)) * bloch_RS(0.0, cfg.omega[0], cfg.Omega(l, j)).R /
                  (2.0 * cfg.omega[0]);
  return m;
}

/// <Psi_lj Upsilon_ki> = E0^4 |p_lj|^2 |p_ki|^2 (R_lj S_ki + S_lj R_ki) / (4 omega).
inline double bloch_psi_upsilon_average(const BlochConfig& cfg, Eigen::Index l, Eigen::Index j, Eigen::Index k,
                                        Eigen::Index i) {
  if (cfg.omega.size() != 1) throw ValidationError("bloch_psi_upsilon_average: monochromatic wave required");
  const double w = cfg.omega[0];
  const RS lj = bloch_RS(0.0, w, cfg.Omega(l, j));
  const RS ki = bloch_RS(0.0, w, cfg.Omega(k, i));
  const double e4 = std::pow(cfg.E0, 4);
  return e4 * std::norm(cfg.dipole(l, j)) * std::norm(cfg.dipole(k, i)) * (lj.R * ki.S + lj.S * ki.R) / (4.0 * w);
}

}  // namespace mmavg
