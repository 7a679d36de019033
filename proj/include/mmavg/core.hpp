#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mmavg {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes or frequency vectors do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A non-zero multi-index with |alpha . omega| below the resonance threshold.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// A product or primitive produced a mode beyond the configured |alpha| cap.
class ModeCapError : public Error {
 public:
  using Error::Error;
};

/// Standard-averaging closure <phi> = id does not hold.
class ClosureError : public Error {
 public:
  using Error::Error;
};

/// Input outside the operation's domain (non-zero mean, bad decay rate, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Induced l1 operator norm (maximum absolute column sum).
inline double opnorm(const Matrix& m) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

/// l1 vector norm; the scalar case reduces to the absolute value.
inline double l1norm(const Vector& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::abs(v[i]);
  return s;
}

/// Strips the imaginary part after checking it is roundoff.
inline double checked_real(cplx z, double tol = 1e-10) {
  if (std::abs(z.imag()) > tol * std::max(1.0, std::abs(z.real())))
    throw DomainError("imaginary residue " + std::to_string(z.imag()) + " exceeds tolerance");
  return z.real();
}

inline Eigen::VectorXd checked_real(const Vector& v, double tol = 1e-10) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = checked_real(v[i], tol);
  return out;
}

/// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
  const double em1 = std::expm1(z.real());
  const double s = std::sin(0.5 * z.imag());
  const double re = em1 * std::cos(z.imag()) - 2.0 * s * s;
  const double im = std::exp(z.real()) * std::sin(z.imag());
  return {re, im};
}

}  // namespace mmavg
