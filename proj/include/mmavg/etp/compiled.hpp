#pragma once

#include "mmavg/etp/poly.hpp"

#include <cmath>
#include <vector>

namespace mmavg {

/// Evaluation-oriented copy of an ExpTrigPoly for time-stepping loops.
///
/// Distinct decay exponents and distinct phases are exponentiated once per
/// call and shared by every term that uses them. Holds scratch buffers, so one
/// instance belongs to one trajectory at a time.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const ExpTrigPoly& p) : rows_(p.rows()), cols_(p.cols()) {
    for (const auto& t : p.terms()) {
      const double phase = p.freq().dot(t.mode.alpha);
      Item it;
      it.lambda_index = index_of(lambdas_, t.mode.lambda);
      it.phase_index = index_of(phases_, phase);
      it.rate = cplx(0.0, phase) + t.mode.lambda;
      it.coeff = t.coeff;
      items_.push_back(std::move(it));
    }
    lambda_values_.resize(lambdas_.size());
    phase_values_.resize(phases_.size());
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  std::size_t size() const { return items_.size(); }

  /// p(tau) written into out.
  void evaluate(double tau, Matrix& out) const {
    out.setZero(rows_, cols_);
    exponentials(tau);
    for (const auto& it : items_) {
      const cplx z = lambda_values_[it.lambda_index] * phase_values_[it.phase_index];
      if (z == cplx(0.0, 0.0)) continue;
      out += z * it.coeff;
    }
  }

  Matrix evaluate(double tau) const {
    Matrix out;
    evaluate(tau, out);
    return out;
  }

  /// Per-term factors so that sum_k C_k e^{r_k t/eps} f_k equals the integral
  /// of p(s/eps) over [t, t + h]. The constant mode integrates to C h.
  std::vector<cplx> window_factors(double eps, double h) const {
    std::vector<cplx> f(items_.size());
    for (std::size_t k = 0; k < items_.size(); ++k) {
      const cplx r = items_[k].rate;
      if (r == cplx(0.0, 0.0))
        f[k] = h;
      else
        f[k] = eps * mmavg::expm1(r * (h / eps)) / r;
    }
    return f;
  }

  /// Integral of p(s/eps) over [t, t + h] with factors from window_factors(eps, h).
  void window_integral(double t, double eps, const std::vector<cplx>& factors, Matrix& out) const {
    out.setZero(rows_, cols_);
    exponentials(t / eps);
    for (std::size_t k = 0; k < items_.size(); ++k) {
      const auto& it = items_[k];
      const cplx z = lambda_values_[it.lambda_index] * phase_values_[it.phase_index];
      if (z == cplx(0.0, 0.0)) continue;
      out += (z * factors[k]) * it.coeff;
    }
  }

  Matrix window_integral(double t, double h, double eps) const {
    Matrix out;
    window_integral(t, eps, window_factors(eps, h), out);
    return out;
  }

 private:
  struct Item {
    std::size_t lambda_index = 0;
    std::size_t phase_index = 0;
    cplx rate;
    Matrix coeff;
  };

  template <class T>
  static std::size_t index_of(std::vector<T>& pool, const T& v) {
    for (std::size_t k = 0; k < pool.size(); ++k)
      if (pool[k] == v) return k;
    pool.push_back(v);
    return pool.size() - 1;
  }

  void exponentials(double tau) const {
    for (std::size_t k = 0; k < lambdas_.size(); ++k) {
      const cplx e = lambdas_[k] * tau;
      lambda_values_[k] = e.real() < -745.0 ? cplx(0.0, 0.0) : std::exp(e);
    }
    for (std::size_t k = 0; k < phases_.size(); ++k) phase_values_[k] = std::polar(1.0, phases_[k] * tau);
  }

  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<Item> items_;
  std::vector<cplx> lambdas_;
  std::vector<double> phases_;
  mutable std::vector<cplx> lambda_values_;
  mutable std::vector<cplx> phase_values_;
};

}  // namespace mmavg
