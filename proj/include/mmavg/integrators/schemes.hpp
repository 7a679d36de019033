#pragma once

#include "mmavg/engine/decomposition.hpp"
#include "mmavg/engine/field.hpp"
#include "mmavg/etp/compiled.hpp"

#include <string>

namespace mmavg {

enum class Scheme { EE, EEint, RK2, RK2int };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::EE: return "EE";
    case Scheme::EEint: return "EEint";
    case Scheme::RK2: return "RK2";
    case Scheme::RK2int: return "RK2int";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "EE") return Scheme::EE;
  if (s == "EEint") return Scheme::EEint;
  if (s == "RK2") return Scheme::RK2;
  if (s == "RK2int") return Scheme::RK2int;
  throw ValidationError("unknown scheme '" + s + "'");
}

inline bool is_integral(Scheme s) { return s == Scheme::EEint || s == Scheme::RK2int; }

/// Non-stiff order of the scheme applied to the micro-macro system.
inline int scheme_order(Scheme s) { return (s == Scheme::RK2 || s == Scheme::RK2int) ? 2 : 1; }

/// Smallest decomposition order for which the scheme keeps its order uniformly
/// in eps. The integral RK2 gains one order over its plain counterpart.
inline int required_order(Scheme s) { return s == Scheme::RK2 ? 2 : 1; }

/// States above this l1 size count as a blowup.
inline constexpr double kBlowupThreshold = 1e12;

struct MicroMacroState {
  Vector v;
  Vector w;
  double t = 0.0;
};

namespace detail {

/// Compiled polynomial plus cached window factors for steps dt and dt/2.
struct WindowedPoly {
  CompiledPoly poly;
  std::vector<cplx> full, half;

  WindowedPoly() = default;
  WindowedPoly(const ExpTrigPoly& p, double eps, double dt)
      : poly(p), full(poly.window_factors(eps, dt)), half(poly.window_factors(eps, 0.5 * dt)) {}
};

inline void require_step(double eps, double dt) {
  if (!(eps > 0.0)) throw DomainError("time stepping needs eps > 0");
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
}

}  // namespace detail

/// Micro-macro system at fixed (eps, dt):
///   dv/dt = A v,  dw/dt = a_{t/eps} w - delta_{t/eps} v,  u = Phi_{t/eps} v + w.
class MicroMacroSystem {
 public:
  MicroMacroSystem(const MicroMacroDecomposition& dec, const SharpFlatField& field, double eps, double dt)
      : eps_(eps), dt_(dt), A_(dec.A_at(eps)), phi_(dec.phi_at(eps)) {
    detail::require_step(eps, dt);
    if (dec.dim() != field.dim()) throw DimensionError("decomposition and field dimensions differ");
    a_ = detail::WindowedPoly(field.a, eps, dt);
    delta_ = detail::WindowedPoly(dec.delta_at(eps), eps, dt);
  }

  double eps() const { return eps_; }
  double dt() const { return dt_; }
  const Matrix& A() const { return A_; }

  Vector reconstruct(const MicroMacroState& s, bool with_w = true) const {
    phi_.evaluate(s.t / eps_, m1_);
    Vector u = m1_ * s.v;
    if (with_w) u += s.w;
    return u;
  }

  /// One step of the scheme from s.t to s.t + dt.
  void step(MicroMacroState& s, Scheme scheme) const {
    const double t = s.t;
    switch (scheme) {
      case Scheme::EE: {
        a_.poly.evaluate(t / eps_, m1_);
        delta_.poly.evaluate(t / eps_, m2_);
        Vector w = s.w + dt_ * (m1_ * s.w - m2_ * s.v);
        s.v += dt_ * (A_ * s.v);
        s.w = std::move(w);
        break;
      }
      case Scheme::EEint: {
        a_.poly.window_integral(t, eps_, a_.full, m1_);
        delta_.poly.window_integral(t, eps_, delta_.full, m2_);
        Vector w = s.w + m1_ * s.w - m2_ * s.v;
        s.v += dt_ * (A_ * s.v);
        s.w = std::move(w);
        break;
      }
      case Scheme::RK2: {
        a_.poly.evaluate(t / eps_, m1_);
        delta_.poly.evaluate(t / eps_, m2_);
        const Vector vh = s.v + (0.5 * dt_) * (A_ * s.v);
        const Vector wh = s.w + (0.5 * dt_) * (m1_ * s.w - m2_ * s.v);
        const double tm = (t + 0.5 * dt_) / eps_;
        a_.poly.evaluate(tm, m1_);
        delta_.poly.evaluate(tm, m2_);
        s.v += dt_ * (A_ * vh);
        s.w += dt_ * (m1_ * wh - m2_ * vh);
        break;
      }
      case Scheme::RK2int: {
        a_.poly.window_integral(t, eps_, a_.half, m1_);
        delta_.poly.window_integral(t, eps_, delta_.half, m2_);
        const Vector vh = s.v + (0.5 * dt_) * (A_ * s.v);
        const Vector wh = s.w + m1_ * s.w - m2_ * s.v;
        a_.poly.window_integral(t, eps_, a_.full, m1_);
        delta_.poly.window_integral(t, eps_, delta_.full, m2_);
        s.v += dt_ * (A_ * vh);
        s.w += m1_ * wh - m2_ * vh;
        break;
      }
    }
    s.t = t + dt_;
  }

 private:
  double eps_, dt_;
  Matrix A_;
  CompiledPoly phi_;
  detail::WindowedPoly a_, delta_;
  mutable Matrix m1_, m2_;
};

/// The same four schemes applied directly to du/dt = a_{t/eps} u.
class DirectSystem {
 public:
  DirectSystem(const SharpFlatField& field, double eps, double dt) : eps_(eps), dt_(dt) {
    detail::require_step(eps, dt);
    a_ = detail::WindowedPoly(field.a, eps, dt);
  }

  double eps() const { return eps_; }
  double dt() const { return dt_; }

  void step(Vector& u, double t, Scheme scheme) const {
    switch (scheme) {
      case Scheme::EE:
        a_.poly.evaluate(t / eps_, m_);
        u += dt_ * (m_ * u);
        break;
      case Scheme::EEint:
        a_.poly.window_integral(t, eps_, a_.full, m_);
        u += m_ * u;
        break;
      case Scheme::RK2: {
        a_.poly.evaluate(t / eps_, m_);
        const Vector uh = u + (0.5 * dt_) * (m_ * u);
        a_.poly.evaluate((t + 0.5 * dt_) / eps_, m_);
        u += dt_ * (m_ * uh);
        break;
      }
      case Scheme::RK2int: {
        a_.poly.window_integral(t, eps_, a_.half, m_);
        const Vector uh = u + m_ * u;
        a_.poly.window_integral(t, eps_, a_.full, m_);
        u += m_ * uh;
        break;
      }
    }
  }

 private:
  double eps_, dt_;
  detail::WindowedPoly a_;
  mutable Matrix m_;
};

/// v(0) = Phi(0)^{-1} u0 by a direct solve, w(0) = 0.
inline MicroMacroState initial_state(const MicroMacroDecomposition& dec, const Vector& u0, double eps) {
  if (u0.size() != dec.dim()) throw DimensionError("u0 has the wrong dimension");
  if (!(eps >= 0.0)) throw ValidationError("eps must be >= 0");
  const Matrix phi0 = evaluate(dec.phi_at(eps), 0.0);
  Eigen::JacobiSVD<Matrix> svd(phi0);
  const auto& sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > 1e12) throw DomainError("Phi(0) is numerically singular; eps is far beyond eps_n");
  MicroMacroState s;
  s.v = phi0.partialPivLu().solve(u0);
  s.w = Vector::Zero(u0.size());
  s.t = 0.0;
  return s;
}

/// Single step with a freshly built system (convenience; loops should reuse a system).
inline MicroMacroState step(const MicroMacroState& state, const MicroMacroDecomposition& dec,
                            const SharpFlatField& field, double eps, double dt, Scheme scheme) {
  MicroMacroSystem sys(dec, field, eps, dt);
  MicroMacroState s = state;
  sys.step(s, scheme);
  return s;
}

/// u = Phi_{t/eps} v + w. At eps = 0 the map is the identity.
inline Vector reconstruct(const MicroMacroDecomposition& dec, const MicroMacroState& s, double eps) {
  if (eps == 0.0) return s.v + s.w;
  return evaluate(dec.phi_at(eps), s.t / eps) * s.v + s.w;
}

}  // namespace mmavg
