#pragma once

#include "mmavg/core.hpp"
#include "mmavg/etp/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mmavg {

/// Exponent key of a term: tau -> exp((i alpha.omega + lambda) tau).
struct Mode {
  MultiIndex alpha;
  cplx lambda{0.0, 0.0};

  bool sharp() const { return lambda == cplx(0.0, 0.0); }
  bool flat() const { return !sharp(); }

  friend bool operator<(const Mode& a, const Mode& b) {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  }
  friend bool operator==(const Mode& a, const Mode& b) {
    return a.alpha == b.alpha && a.lambda == b.lambda;
  }
};

struct ExpTrigTerm {
  Mode mode;
  Matrix coeff;
};

/// Finite sum of matrix-valued terms C exp((i alpha.omega + lambda) tau).
///
/// Terms with lambda = 0 form the quasi-periodic ("sharp") part, terms with
/// Re lambda < 0 the exponentially decaying ("flat") part. The term list is
/// kept sorted by mode with no repeated mode and no negligible coefficient,
/// which makes the sharp/flat split and the average read-offs direct.
class ExpTrigPoly {
 public:
  /// Coefficients smaller than this fraction of the largest are dropped.
  static constexpr double kDropTolerance = 1e-14;
  /// Decay exponents closer than this (relative) are treated as one mode.
  static constexpr double kMergeTolerance = 1e-13;

  ExpTrigPoly() = default;
  ExpTrigPoly(FrequencyVector freq, Eigen::Index rows, Eigen::Index cols)
      : freq_(std::move(freq)), rows_(rows), cols_(cols) {}
  ExpTrigPoly(FrequencyVector freq, Eigen::Index rows, Eigen::Index cols, std::vector<ExpTrigTerm> terms)
      : freq_(std::move(freq)), rows_(rows), cols_(cols), terms_(std::move(terms)) {
    canonicalize();
  }

  static ExpTrigPoly constant(const FrequencyVector& f, const Matrix& c) {
    return ExpTrigPoly(f, c.rows(), c.cols(), {{Mode{MultiIndex(f.rank(), 0), {}}, c}});
  }
  static ExpTrigPoly identity(const FrequencyVector& f, Eigen::Index d) {
    return constant(f, Matrix::Identity(d, d));
  }
  static ExpTrigPoly scalar(const FrequencyVector& f, cplx c) {
    return constant(f, Matrix::Constant(1, 1, c));
  }
  /// Single scalar term c exp((i alpha.omega + lambda) tau).
  static ExpTrigPoly term(const FrequencyVector& f, MultiIndex alpha, cplx lambda, cplx c) {
    return ExpTrigPoly(f, 1, 1, {{Mode{std::move(alpha), lambda}, Matrix::Constant(1, 1, c)}});
  }
  /// amp cos(omega_p tau).
  static ExpTrigPoly cos_mode(const FrequencyVector& f, std::size_t p, double amp = 1.0) {
    MultiIndex plus(f.rank(), 0), minus(f.rank(), 0);
    plus[p] = 1;
    minus[p] = -1;
    return ExpTrigPoly(f, 1, 1,
                       {{Mode{plus, {}}, Matrix::Constant(1, 1, 0.5 * amp)},
                        {Mode{minus, {}}, Matrix::Constant(1, 1, 0.5 * amp)}});
  }
  /// amp sin(omega_p tau).
  static ExpTrigPoly sin_mode(const FrequencyVector& f, std::size_t p, double amp = 1.0) {
    MultiIndex plus(f.rank(), 0), minus(f.rank(), 0);
    plus[p] = 1;
    minus[p] = -1;
    const cplx h = cplx(0.0, -0.5 * amp);
    return ExpTrigPoly(f, 1, 1,
                       {{Mode{plus, {}}, Matrix::Constant(1, 1, h)}, {Mode{minus, {}}, Matrix::Constant(1, 1, -h)}});
  }

  const FrequencyVector& freq() const { return freq_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const std::vector<ExpTrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  /// Coefficient of the given mode, or nullptr.
  const Matrix* find(const Mode& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const ExpTrigTerm& t, const Mode& k) { return t.mode < k; });
    if (it != terms_.end() && it->mode == m) return &it->coeff;
    return nullptr;
  }

  /// Complex exponent i alpha.omega + lambda of a mode.
  cplx rate(const Mode& m) const { return cplx(0.0, freq_.dot(m.alpha)) + m.lambda; }

  int max_order() const {
    int k = 0;
    for (const auto& t : terms_) k = std::max(k, order_of(t.mode.alpha));
    return k;
  }

  double max_coefficient() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, opnorm(t.coeff));
    return m;
  }

 private:
  void canonicalize();

  FrequencyVector freq_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  std::vector<ExpTrigTerm> terms_;
};

inline void ExpTrigPoly::canonicalize() {
  for (const auto& t : terms_) {
    if (t.mode.alpha.size() != freq_.rank()) throw DimensionError("multi-index length differs from frequency rank");
    if (t.coeff.rows() != rows_ || t.coeff.cols() != cols_) throw DimensionError("term coefficient shape mismatch");
    if (t.mode.lambda.real() > 0.0) throw DomainError("growing exponent Re(lambda) > 0 is not allowed");
    if (t.mode.lambda.real() == 0.0 && t.mode.lambda.imag() != 0.0)
      throw DomainError("purely imaginary decay exponent; fold it into the multi-index");
  }
  std::sort(terms_.begin(), terms_.end(), [](const ExpTrigTerm& a, const ExpTrigTerm& b) { return a.mode < b.mode; });

  std::vector<ExpTrigTerm> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty()) {
      auto& back = merged.back();
      const double scale = std::max(1.0, std::abs(back.mode.lambda));
      if (back.mode.alpha == t.mode.alpha && std::abs(back.mode.lambda - t.mode.lambda) <= kMergeTolerance * scale) {
        back.coeff += t.coeff;
        continue;
      }
    }
    merged.push_back(std::move(t));
  }

  double biggest = 0.0;
  std::vector<double> norms(merged.size());
  for (std::size_t k = 0; k < merged.size(); ++k) {
    norms[k] = opnorm(merged[k].coeff);
    biggest = std::max(biggest, norms[k]);
  }
  terms_.clear();
  for (std::size_t k = 0; k < merged.size(); ++k) {
    if (norms[k] == 0.0 || norms[k] <= kDropTolerance * biggest) continue;
    const auto& m = merged[k].mode;
    if (order_of(m.alpha) > freq_.max_order)
      throw ModeCapError("mode |alpha| = " + std::to_string(order_of(m.alpha)) + " exceeds cap " +
                         std::to_string(freq_.max_order));
    if (m.sharp() && !is_zero(m.alpha) && std::abs(freq_.dot(m.alpha)) <= freq_.resonance_tol)
      throw ResonanceError("numerically resonant sharp mode");
    terms_.push_back(std::move(merged[k]));
  }
}

namespace detail {

inline void require_same_freq(const ExpTrigPoly& p, const ExpTrigPoly& q) {
  if (!(p.freq() == q.freq())) throw DimensionError("frequency vectors differ");
}

inline std::vector<ExpTrigTerm> copy_terms(const ExpTrigPoly& p) { return p.terms(); }

}  // namespace detail

inline ExpTrigPoly operator+(const ExpTrigPoly& p, const ExpTrigPoly& q) {
  detail::require_same_freq(p, q);
  if (p.rows() != q.rows() || p.cols() != q.cols()) throw DimensionError("add: shape mismatch");
  auto terms = detail::copy_terms(p);
  terms.insert(terms.end(), q.terms().begin(), q.terms().end());
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

inline ExpTrigPoly operator*(cplx s, const ExpTrigPoly& p) {
  auto terms = detail::copy_terms(p);
  for (auto& t : terms) t.coeff *= s;
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

inline ExpTrigPoly operator-(const ExpTrigPoly& p) { return cplx(-1.0) * p; }
inline ExpTrigPoly operator-(const ExpTrigPoly& p, const ExpTrigPoly& q) { return p + (-q); }

/// Noncommutative product: modes and decay exponents add, coefficients multiply in order.
inline ExpTrigPoly operator*(const ExpTrigPoly& p, const ExpTrigPoly& q) {
  detail::require_same_freq(p, q);
  if (p.cols() != q.rows()) throw DimensionError("mul: inner dimensions differ");
  std::vector<ExpTrigTerm> terms;
  terms.reserve(p.size() * q.size());
  const std::size_t r = p.freq().rank();
  for (const auto& s : p.terms()) {
    for (const auto& t : q.terms()) {
      Mode m{MultiIndex(r), s.mode.lambda + t.mode.lambda};
      for (std::size_t k = 0; k < r; ++k) m.alpha[k] = s.mode.alpha[k] + t.mode.alpha[k];
      terms.push_back({std::move(m), s.coeff * t.coeff});
    }
  }
  return ExpTrigPoly(p.freq(), p.rows(), q.cols(), std::move(terms));
}

/// p(tau) M for a constant matrix M.
inline ExpTrigPoly operator*(const ExpTrigPoly& p, const Matrix& m) {
  if (p.cols() != m.rows()) throw DimensionError("mul: inner dimensions differ");
  auto terms = detail::copy_terms(p);
  for (auto& t : terms) t.coeff = t.coeff * m;
  return ExpTrigPoly(p.freq(), p.rows(), m.cols(), std::move(terms));
}

inline ExpTrigPoly operator*(const Matrix& m, const ExpTrigPoly& p) {
  if (m.cols() != p.rows()) throw DimensionError("mul: inner dimensions differ");
  auto terms = detail::copy_terms(p);
  for (auto& t : terms) t.coeff = m * t.coeff;
  return ExpTrigPoly(p.freq(), m.rows(), p.cols(), std::move(terms));
}

/// Scalar (1x1) polynomial times a constant matrix.
inline ExpTrigPoly outer(const ExpTrigPoly& s, const Matrix& m) {
  if (s.rows() != 1 || s.cols() != 1) throw DimensionError("outer: expected a scalar polynomial");
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : s.terms()) terms.push_back({t.mode, t.coeff(0, 0) * m});
  return ExpTrigPoly(s.freq(), m.rows(), m.cols(), std::move(terms));
}

/// Scalar polynomial of entry (i, j).
inline ExpTrigPoly entry(const ExpTrigPoly& p, Eigen::Index i, Eigen::Index j) {
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : p.terms()) terms.push_back({t.mode, Matrix::Constant(1, 1, t.coeff(i, j))});
  return ExpTrigPoly(p.freq(), 1, 1, std::move(terms));
}

/// Long-time average: the coefficient of the (alpha = 0, lambda = 0) term.
inline Matrix average(const ExpTrigPoly& p) {
  const Matrix* c = p.find(Mode{MultiIndex(p.freq().rank(), 0), {}});
  return c ? *c : Matrix::Zero(p.rows(), p.cols());
}

inline ExpTrigPoly sharp_part(const ExpTrigPoly& p) {
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : p.terms())
    if (t.mode.sharp()) terms.push_back(t);
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

inline ExpTrigPoly flat_part(const ExpTrigPoly& p) {
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : p.terms())
    if (t.mode.flat()) terms.push_back(t);
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

/// Slowest decay rate g = min(-Re lambda) over flat terms; +inf when there are none.
inline double flat_rate(const ExpTrigPoly& p) {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& t : p.terms())
    if (t.mode.flat()) g = std::min(g, -t.mode.lambda.real());
  return g;
}

/// Termwise p-th derivative in tau.
inline ExpTrigPoly derivative(const ExpTrigPoly& p, int order = 1) {
  if (order < 0) throw DomainError("derivative order must be >= 0");
  auto terms = detail::copy_terms(p);
  for (auto& t : terms) t.coeff *= std::pow(p.rate(t.mode), order);
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

/// Zero-mean antiderivative. Sharp modes are divided by i alpha.omega and flat
/// modes by their full exponent, i.e. the flat part is integrated from +infinity.
/// A (0,0) coefficient up to `mean_tol` times the largest one counts as roundoff.
inline ExpTrigPoly zero_mean_primitive(const ExpTrigPoly& p, double mean_tol = 1e-12) {
  const double scale = std::max(1.0, p.max_coefficient());
  std::vector<ExpTrigTerm> terms;
  terms.reserve(p.size());
  for (const auto& t : p.terms()) {
    if (t.mode.sharp() && is_zero(t.mode.alpha)) {
      if (opnorm(t.coeff) > mean_tol * scale) throw DomainError("zero_mean_primitive: input has nonzero mean");
      continue;
    }
    const cplx r = p.rate(t.mode);
    if (t.mode.sharp() && std::abs(r.imag()) <= p.freq().resonance_tol)
      throw ResonanceError("zero_mean_primitive: small divisor below resonance tolerance");
    terms.push_back({t.mode, t.coeff / r});
  }
  return ExpTrigPoly(p.freq(), p.rows(), p.cols(), std::move(terms));
}

/// N_kappa: sum of e^{kappa |alpha|} |C| over sharp terms plus the sum of |C|
/// over flat terms, a bound on sup e^{g tau}|flat(tau)| with g = flat_rate(p).
/// In strict mode the flat rate must be at least 1.
inline double norm_kappa(const ExpTrigPoly& p, double kappa, bool strict = false) {
  if (kappa < 0.0) throw DomainError("norm_kappa: kappa must be >= 0");
  if (strict && flat_rate(p) < 1.0) throw DomainError("norm_kappa: flat decay rate below 1 in strict mode");
  double sharp = 0.0, flat = 0.0;
  for (const auto& t : p.terms()) {
    const double n = opnorm(t.coeff);
    if (t.mode.sharp())
      sharp += std::exp(kappa * order_of(t.mode.alpha)) * n;
    else
      flat += n;
  }
  return sharp + flat;
}

inline Matrix evaluate(const ExpTrigPoly& p, double tau) {
  Matrix out = Matrix::Zero(p.rows(), p.cols());
  for (const auto& t : p.terms()) out += std::exp(p.rate(t.mode) * tau) * t.coeff;
  return out;
}

/// Largest coefficient (operator norm) of p - q over the union of their modes.
inline double coefficient_distance(const ExpTrigPoly& p, const ExpTrigPoly& q) {
  detail::require_same_freq(p, q);
  std::vector<ExpTrigTerm> terms = detail::copy_terms(p);
  for (const auto& t : q.terms()) terms.push_back({t.mode, -t.coeff});
  std::sort(terms.begin(), terms.end(), [](const ExpTrigTerm& a, const ExpTrigTerm& b) { return a.mode < b.mode; });
  double worst = 0.0;
  for (std::size_t k = 0; k < terms.size();) {
    Matrix acc = terms[k].coeff;
    std::size_t j = k + 1;
    const double scale = std::max(1.0, std::abs(terms[k].mode.lambda));
    while (j < terms.size() && terms[j].mode.alpha == terms[k].mode.alpha &&
           std::abs(terms[j].mode.lambda - terms[k].mode.lambda) <= ExpTrigPoly::kMergeTolerance * scale) {
      acc += terms[j].coeff;
      ++j;
    }
    worst = std::max(worst, opnorm(acc));
    k = j;
  }
  return worst;
}

}  // namespace mmavg
