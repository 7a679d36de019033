#pragma once

#include "mmavg/integrators/schemes.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace mmavg {

/// Uniform-grid trajectory t^l = l dt, l = 0..L, sampled every `stride` steps
/// (the final step is always kept). Direct runs fill u only.
struct Trajectory {
  Scheme scheme = Scheme::EE;
  bool direct = false;
  int order = -1;
  double eps = 0.0;
  double dt = 0.0;
  long steps = 0;
  long stride = 1;
  std::vector<long> index;  ///< step number l of each stored sample
  std::vector<double> t;
  std::vector<Vector> v, w, u;
  std::vector<Vector> u_macro;  ///< Phi v without the micro part
  bool blowup = false;
  bool eps_exceeds_threshold = false;

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline void check_grid(double T, long L, long stride) {
  if (!(T > 0.0)) throw ValidationError("T must be positive");
  if (L < 1) throw ValidationError("L must be >= 1");
  if (stride < 1) throw ValidationError("stride must be >= 1");
}

inline bool finite_and_small(const Vector& x) {
  const double n = l1norm(x);
  return std::isfinite(n) && n <= kBlowupThreshold;
}

}  // namespace detail

/// Runs L steps of dt = T/L on the micro-macro system from v(0) = Phi(0)^{-1} u0, w(0) = 0.
inline Trajectory solve_micro_macro(const MicroMacroDecomposition& dec, const SharpFlatField& field, const Vector& u0,
                                    double T, long L, double eps, Scheme scheme, long stride = 1) {
  detail::check_grid(T, L, stride);
  const double dt = T / static_cast<double>(L);
  const MicroMacroSystem sys(dec, field, eps, dt);
  Trajectory tr;
  tr.scheme = scheme;
  tr.order = dec.order;
  tr.eps = eps;
  tr.dt = dt;
  tr.steps = L;
  tr.stride = stride;
  tr.eps_exceeds_threshold = eps > dec.eps_n;

  MicroMacroState s = initial_state(dec, u0, eps);
  auto record = [&](long l) {
    tr.index.push_back(l);
    tr.t.push_back(s.t);
    tr.v.push_back(s.v);
    tr.w.push_back(s.w);
    Vector um = sys.reconstruct(s, false);
    tr.u.push_back(um + s.w);
    tr.u_macro.push_back(std::move(um));
  };
  record(0);
  for (long l = 0; l < L; ++l) {
    sys.step(s, scheme);
    s.t = static_cast<double>(l + 1) * dt;
    if (!detail::finite_and_small(s.v) || !detail::finite_and_small(s.w)) {
      tr.blowup = true;
      break;
    }
    if ((l + 1) % stride == 0 || l + 1 == L) record(l + 1);
  }
  return tr;
}

/// The same schemes on du/dt = a_{t/eps} u.
inline Trajectory solve_direct(const SharpFlatField& field, const Vector& u0, double T, long L, double eps,
                               Scheme scheme, long stride = 1) {
  detail::check_grid(T, L, stride);
  if (u0.size() != field.dim()) throw DimensionError("u0 has the wrong dimension");
  const double dt = T / static_cast<double>(L);
  const DirectSystem sys(field, eps, dt);
  Trajectory tr;
  tr.scheme = scheme;
  tr.direct = true;
  tr.eps = eps;
  tr.dt = dt;
  tr.steps = L;
  tr.stride = stride;

  Vector u = u0;
  tr.index.push_back(0);
  tr.t.push_back(0.0);
  tr.u.push_back(u);
  for (long l = 0; l < L; ++l) {
    sys.step(u, static_cast<double>(l) * dt, scheme);
    if (!detail::finite_and_small(u)) {
      tr.blowup = true;
      break;
    }
    if ((l + 1) % stride == 0 || l + 1 == L) {
      tr.index.push_back(l + 1);
      tr.t.push_back(static_cast<double>(l + 1) * dt);
      tr.u.push_back(u);
    }
  }
  return tr;
}

/// CSV: '#' header block with scheme, n, eps, dt, then t and Re/Im of each component.
inline void write_trajectory_csv(const Trajectory& tr, std::ostream& out) {
  out << "# scheme=" << to_string(tr.scheme) << '\n';
  out << "# mode=" << (tr.direct ? "direct" : "micro_macro") << '\n';
  out << "# n=" << tr.order << '\n';
  out << std::setprecision(17);
  out << "# eps=" << tr.eps << '\n';
  out << "# dt=" << tr.dt << '\n';
  out << "# blowup=" << (tr.blowup ? 1 : 0) << '\n';
  const Eigen::Index d = tr.u.empty() ? 0 : tr.u.front().size();
  out << 't';
  auto cols = [&](const char* name) {
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << name << i << "_re," << name << i << "_im";
  };
  if (!tr.direct) {
    cols("v");
    cols("w");
  }
  cols("u");
  out << '\n';
  auto vals = [&](const Vector& x) {
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << x[i].real() << ',' << x[i].imag();
  };
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out << tr.t[k];
    if (!tr.direct) {
      vals(tr.v[k]);
      vals(tr.w[k]);
    }
    vals(tr.u[k]);
    out << '\n';
  }
}

inline void write_trajectory_csv(const Trajectory& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  write_trajectory_csv(tr, out);
}

}  // namespace mmavg
