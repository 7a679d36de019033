#pragma once

#include "mmavg/etp/poly.hpp"

#include <cmath>
#include <vector>

namespace mmavg {

/// Polynomial in eps with constant-matrix coefficients: sum_k eps^k A_k.
struct MatrixEpsPoly {
  std::vector<Matrix> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

  Matrix at(double eps) const {
    Matrix out = Matrix::Zero(coeffs.front().rows(), coeffs.front().cols());
    double pw = 1.0;
    for (const auto& c : coeffs) {
      out += pw * c;
      pw *= eps;
    }
    return out;
  }
};

/// Polynomial in eps whose coefficients are ExpTrigPolys: sum_k eps^k P_k(tau).
///
/// The fixed point that builds the change of variables is polynomial in eps at
/// every step, so storing it this way makes one construction serve every eps.
class EpsPoly {
 public:
  EpsPoly() = default;
  explicit EpsPoly(ExpTrigPoly p) { coeffs_.push_back(std::move(p)); }
  explicit EpsPoly(std::vector<ExpTrigPoly> c) : coeffs_(std::move(c)) {
    if (coeffs_.empty()) throw DimensionError("EpsPoly needs at least one coefficient");
  }

  static EpsPoly zero(const FrequencyVector& f, Eigen::Index rows, Eigen::Index cols) {
    return EpsPoly(ExpTrigPoly(f, rows, cols));
  }

  const std::vector<ExpTrigPoly>& coeffs() const { return coeffs_; }
  const ExpTrigPoly& operator[](std::size_t k) const { return coeffs_.at(k); }
  std::size_t degree() const { return coeffs_.size() - 1; }
  const FrequencyVector& freq() const { return coeffs_.front().freq(); }
  Eigen::Index rows() const { return coeffs_.front().rows(); }
  Eigen::Index cols() const { return coeffs_.front().cols(); }

  /// Collapse to a single ExpTrigPoly at a given eps.
  ExpTrigPoly at(double eps) const {
    std::vector<ExpTrigTerm> terms;
    double pw = 1.0;
    for (const auto& c : coeffs_) {
      if (pw != 0.0)
        for (const auto& t : c.terms()) terms.push_back({t.mode, pw * t.coeff});
      pw *= eps;
    }
    return ExpTrigPoly(freq(), rows(), cols(), std::move(terms));
  }

  /// Multiply by eps (shift coefficients up one degree).
  EpsPoly times_eps() const {
    std::vector<ExpTrigPoly> c;
    c.push_back(ExpTrigPoly(freq(), rows(), cols()));
    c.insert(c.end(), coeffs_.begin(), coeffs_.end());
    return EpsPoly(std::move(c));
  }

  friend EpsPoly operator+(const EpsPoly& p, const EpsPoly& q) {
    const std::size_t n = std::max(p.coeffs_.size(), q.coeffs_.size());
    std::vector<ExpTrigPoly> c;
    for (std::size_t k = 0; k < n; ++k) {
      if (k < p.coeffs_.size() && k < q.coeffs_.size())
        c.push_back(p.coeffs_[k] + q.coeffs_[k]);
      else
        c.push_back(k < p.coeffs_.size() ? p.coeffs_[k] : q.coeffs_[k]);
    }
    return EpsPoly(std::move(c));
  }

  friend EpsPoly operator-(const EpsPoly& p) {
    std::vector<ExpTrigPoly> c;
    for (const auto& x : p.coeffs_) c.push_back(-x);
    return EpsPoly(std::move(c));
  }

  friend EpsPoly operator-(const EpsPoly& p, const EpsPoly& q) { return p + (-q); }

  /// a(tau) * P for an eps-independent left factor.
  friend EpsPoly operator*(const ExpTrigPoly& a, const EpsPoly& p) {
    std::vector<ExpTrigPoly> c;
    for (const auto& x : p.coeffs_) c.push_back(a * x);
    return EpsPoly(std::move(c));
  }

  /// Cauchy product P(eps, tau) * A(eps).
  friend EpsPoly operator*(const EpsPoly& p, const MatrixEpsPoly& m) {
    const std::size_t n = p.coeffs_.size() + m.coeffs.size() - 1;
    std::vector<std::vector<ExpTrigTerm>> acc(n);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < m.coeffs.size(); ++j) {
        if (m.coeffs[j].isZero(0.0)) continue;
        for (const auto& t : p.coeffs_[i].terms()) acc[i + j].push_back({t.mode, t.coeff * m.coeffs[j]});
      }
    std::vector<ExpTrigPoly> c;
    const Eigen::Index cols = m.coeffs.front().cols();
    for (auto& terms : acc) c.emplace_back(p.freq(), p.rows(), cols, std::move(terms));
    return EpsPoly(std::move(c));
  }

 private:
  std::vector<ExpTrigPoly> coeffs_;
};

inline MatrixEpsPoly average(const EpsPoly& p) {
  MatrixEpsPoly out;
  for (const auto& c : p.coeffs()) out.coeffs.push_back(average(c));
  return out;
}

inline EpsPoly zero_mean_primitive(const EpsPoly& p, double mean_tol = 1e-12) {
  std::vector<ExpTrigPoly> c;
  for (const auto& x : p.coeffs()) c.push_back(zero_mean_primitive(x, mean_tol));
  return EpsPoly(std::move(c));
}

inline EpsPoly derivative(const EpsPoly& p, int order = 1) {
  std::vector<ExpTrigPoly> c;
  for (const auto& x : p.coeffs()) c.push_back(derivative(x, order));
  return EpsPoly(std::move(c));
}

/// Largest coefficient distance over all eps powers.
inline double coefficient_distance(const EpsPoly& p, const EpsPoly& q) {
  const std::size_t n = std::max(p.coeffs().size(), q.coeffs().size());
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k < p.coeffs().size() && k < q.coeffs().size())
      worst = std::max(worst, coefficient_distance(p[k], q[k]));
    else
      worst = std::max(worst, (k < p.coeffs().size() ? p[k] : q[k]).max_coefficient());
  }
  return worst;
}

}  // namespace mmavg
