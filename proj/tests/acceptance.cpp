// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "mmavg/mmavg.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace mmavg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int k, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", k, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void run(int k, const std::function<bool(std::ostringstream&)>& body) {
  std::ostringstream msg;
  bool ok = false;
  try {
    ok = body(msg);
  } catch (const std::exception& e) {
    msg << " exception: " << e.what();
  }
  report(k, ok, msg.str());
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3g", x);
  return b;
}

double rel_distance(const ExpTrigPoly& got, const ExpTrigPoly& expect) {
  return coefficient_distance(got, expect) / std::max(1e-300, expect.max_coefficient());
}

/// Closed forms for the toy objects, built from trig constructors only.
struct ToyClosedForms {
  ExpTrigPoly b, B, flat, C1, C2, delta1_over_eps, delta2_over_eps2;

  explicit ToyClosedForms(const ToyConfig& cfg) {
    const FrequencyVector f = toy_frequencies(cfg);
    const std::size_t r = f.rank();
    const double rr = static_cast<double>(r);
    b = ExpTrigPoly(f, 1, 1);
    B = ExpTrigPoly(f, 1, 1);
    for (std::size_t p = 0; p < r; ++p) {
      b = b + ExpTrigPoly::cos_mode(f, p, 1.0 / rr);
      B = B + ExpTrigPoly::sin_mode(f, p, 1.0 / (rr * f.omega[p]));
    }
    flat = ExpTrigPoly::term(f, MultiIndex(r, 0), -1.0, cfg.gamma);
    C1 = B - flat;
    ExpTrigPoly sharp(f, 1, 1);
    for (std::size_t p = 0; p < r; ++p) {
      const double w = f.omega[p];
      const auto s = ExpTrigPoly::sin_mode(f, p);
      sharp = sharp + cplx(1.0 / (2 * w * w * rr * rr)) * (s * s - ExpTrigPoly::scalar(f, 0.5));
    }
    for (std::size_t p1 = 0; p1 < r; ++p1)
      for (std::size_t p2 = 0; p2 < r; ++p2) {
        if (p1 == p2) continue;
        const double w1 = f.omega[p1], w2 = f.omega[p2];
        const double k = 1.0 / (w2 * (w1 * w1 - w2 * w2) * rr * rr);
        sharp = sharp + cplx(k * w1) * (ExpTrigPoly::sin_mode(f, p1) * ExpTrigPoly::sin_mode(f, p2)) +
                cplx(k * w2) * (ExpTrigPoly::cos_mode(f, p1) * ExpTrigPoly::cos_mode(f, p2));
      }
    C2 = sharp - flat * B + cplx(0.5) * (flat * flat);
    delta1_over_eps = -((b + flat) * C1);
    delta2_over_eps2 = -((b + flat) * C2);
  }
};

std::vector<ToyConfig> toy_variants() {
  return {ToyConfig::one_frequency(0.0), ToyConfig::one_frequency(1.0), ToyConfig::three_frequencies(0.0),
          ToyConfig::three_frequencies(1.0)};
}

/// Per-eps slopes, global slope and per-dt spread of a toy sweep.
struct SweepSummary {
  double global = 0.0, slope_min = 1e300, slope_max = -1e300, spread = 0.0;
};

SweepSummary summarize(const std::vector<ErrorRecord>& recs, double accuracy, double spread_eps_max = 1e300) {
  SweepSummary s;
  s.global = fit_order(recs, accuracy).slope;
  for (const auto& [eps, f] : fit_order_by_eps(recs, accuracy)) {
    s.slope_min = std::min(s.slope_min, f.slope);
    s.slope_max = std::max(s.slope_max, f.slope);
  }
  std::vector<ErrorRecord> sub;
  for (const auto& r : recs)
    if (r.eps <= spread_eps_max * (1 + 1e-12)) sub.push_back(r);
  for (const auto& [dt, v] : eps_spread_by_dt(sub)) s.spread = std::max(s.spread, v);
  return s;
}

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

std::vector<long> toy_steps() {
  // dt = 10/2^5 ... 10/2^13, inside [1e-3, 0.6]
  std::vector<long> s;
  for (int k = 5; k <= 13; ++k) s.push_back(1L << k);
  return s;
}

SweepConfig toy_sweep(const std::string& problem, int n, Scheme scheme) {
  SweepConfig c;
  c.problem = problem;
  c.order = n;
  c.scheme = scheme;
  c.eps = geometric_grid(0.5, 1e-4, 13);
  c.steps = toy_steps();
  return c;
}

bool uniform_order(std::ostringstream& msg, const std::string& label, const std::vector<ErrorRecord>& recs,
                   double order, double tol, double spread_max) {
  const auto s = summarize(recs, 1e-13);
  msg << label << " slope " << fmt(s.global) << " (per eps " << fmt(s.slope_min) << ".." << fmt(s.slope_max)
      << "), max eps spread " << fmt(s.spread) << "; ";
  return within(s.global, order, tol) && within(s.slope_min, order, tol) && within(s.slope_max, order, tol) &&
         s.spread <= spread_max;
}

}  // namespace

int main() {
  // 1. Symbolic fidelity on the toy model.
  run(1, [](std::ostringstream& msg) {
    const auto t0 = Clock::now();
    double worst = 0.0, a_err = 0.0;
    for (const auto& cfg : toy_variants()) {
      const ToyClosedForms cf(cfg);
      const auto field = toy_field(cfg);
      const auto d1 = iterate(field, 1);
      const auto d2 = iterate(field, 2);
      const auto& phi1 = d1.phi();
      worst = std::max(worst, rel_distance(phi1[1], cf.C1));
      worst = std::max(worst, rel_distance(d1.delta[1], cf.delta1_over_eps));
      const auto& phi2 = d2.phi();
      worst = std::max(worst, rel_distance(phi2[1], cf.C1));
      worst = std::max(worst, rel_distance(phi2[2], cf.C2));
      worst = std::max(worst, rel_distance(sharp_part(phi2[2]), sharp_part(cf.C2)));
      worst = std::max(worst, rel_distance(flat_part(phi2[2]), flat_part(cf.C2)));
      worst = std::max(worst, rel_distance(d2.delta[2], cf.delta2_over_eps2));
      for (std::size_t k = 0; k < d1.delta.coeffs().size(); ++k)
        if (k != 1) worst = std::max(worst, d1.delta[k].max_coefficient());
      for (std::size_t k = 0; k < d2.delta.coeffs().size(); ++k)
        if (k != 2) worst = std::max(worst, d2.delta[k].max_coefficient());
      for (const auto* d : {&d1, &d2}) {
        a_err = std::max(a_err, std::abs(d->A.coeffs[0](0, 0) - cplx(-1.0)));
        for (std::size_t k = 1; k < d->A.coeffs.size(); ++k) a_err = std::max(a_err, d->A.coeffs[k].cwiseAbs().maxCoeff());
      }
    }
    const double dt = seconds_since(t0);
    msg << "toy 1F/3F, gamma in {0,1}: max relative coefficient error " << fmt(worst) << ", |A + 1| " << fmt(a_err)
        << ", " << fmt(dt) << " s";
    return worst <= 1e-12 && a_err <= 1e-12 && dt < 1.0;
  });

  // 2. Uniform accuracy on toy 3F, gamma = 0.
  run(2, [](std::ostringstream& msg) {
    const auto t0 = Clock::now();
    const bool a = uniform_order(msg, "n=2 RK2", run_sweep(toy_sweep("toy-3f", 2, Scheme::RK2)), 2.0, 0.2, 3.0);
    const bool b = uniform_order(msg, "n=1 EE", run_sweep(toy_sweep("toy-3f", 1, Scheme::EE)), 1.0, 0.15, 3.0);
    const double dt = seconds_since(t0);
    msg << fmt(dt) << " s";
    return a && b && dt < 120.0;
  });

  // 3. Integral scheme lifts the order.
  run(3, [](std::ostringstream& msg) {
    return uniform_order(msg, "n=1 RK2int", run_sweep(toy_sweep("toy-3f", 1, Scheme::RK2int)), 2.0, 0.2, 3.0);
  });

  // 4. The flat part does not change criterion 2.
  run(4, [](std::ostringstream& msg) {
    return uniform_order(msg, "gamma=1 n=2 RK2", run_sweep(toy_sweep("toy-3f-g1", 2, Scheme::RK2)), 2.0, 0.2, 3.0);
  });

  // 5. Micro variable size and smoothness.
  run(5, [](std::ostringstream& msg) {
    bool ok = true;
    const auto epss = geometric_grid(1e-1, 1e-3, 7);
    for (const char* name : {"toy-1f-g1", "toy-3f-g1"}) {
      const Problem p = make_preset(name);
      const oracle::Toy toy{p.toy->omega, p.toy->gamma};
      for (int n : {1, 2}) {
        const auto dec = iterate(p.field, n);
        std::vector<double> x, y, d2;
        double oracle_gap = 0.0;
        for (double eps : epss) {
          const CompiledPoly phi(dec.phi_at(eps));
          const cplx A = dec.A_at(eps)(0, 0);
          const cplx v0 = initial_state(dec, p.u0, eps).v[0];
          auto w = [&](double t) { return toy_exact(*p.toy, eps, t) - (phi.evaluate(t / eps)(0, 0) * std::exp(A * t) * v0).real(); };
          double wmax = 0.0, dmax = 0.0;
          const double h = eps / 50.0;
          for (int k = 0; k <= 40000; ++k) {
            const double t = 2.0 * k / 40000.0;
            const double wt = w(t);
            wmax = std::max(wmax, std::abs(wt));
            oracle_gap = std::max(oracle_gap, std::abs(wt - toy.micro(n, 1.0, eps, t)));
            if (n == 1 && t >= h) dmax = std::max(dmax, std::abs((w(t + h) - 2 * wt + w(t - h)) / (h * h)));
          }
          x.push_back(std::log(eps));
          y.push_back(std::log(wmax));
          d2.push_back(dmax);
        }
        double mx = 0, my = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
        for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
        const double expo = sxy / sxx;
        msg << name << " n=" << n << " exponent " << fmt(expo) << " (oracle gap " << fmt(oracle_gap) << ")";
        ok = ok && expo >= n + 0.8 && oracle_gap <= 1e-12;
        if (n == 1) {
          std::vector<double> s = d2;
          std::sort(s.begin(), s.end());
          const double median = s[s.size() / 2];
          msg << ", d2w max/median " << fmt(s.back() / median);
          ok = ok && s.back() <= 3.0 * median;
        }
        msg << "; ";
      }
    }
    return ok;
  });

  // 6. Order reduction of the direct scheme against micro-macro.
  run(6, [](std::ostringstream& msg) {
    const Problem p = make_preset("toy-3f");
    const auto dec = iterate(p.field, 2);
    double best_direct = 0.0, best_mm = 0.0, best_dt = 0.0, best_eps = 0.0;
    for (long L : {200L, 400L, 800L})
      for (double eps : {1e-2, 3e-3, 1e-3}) {
        const auto ref = exact_reference(p, eps);
        const double ed = compute_error(solve_direct(p.field, p.u0, p.T, L, eps, Scheme::RK2), ref);
        const double em = compute_error(solve_micro_macro(dec, p.field, p.u0, p.T, L, eps, Scheme::RK2), ref);
        if (em <= 1e-2 && ed >= 0.1 && ed / em > best_direct / std::max(best_mm, 1e-300)) {
          best_direct = ed;
          best_mm = em;
          best_dt = p.T / L;
          best_eps = eps;
        }
      }
    const bool ok = best_direct >= 0.1 && best_mm <= 1e-2;
    if (ok)
      msg << "dt=" << fmt(best_dt) << " eps=" << fmt(best_eps) << ": direct RK2 " << fmt(best_direct)
          << ", micro-macro n=2 RK2 " << fmt(best_mm);
    else
      msg << "no (dt, eps) pair separates the schemes";
    return ok;
  });

  // 7. Defect bounds at eps_n / 2.
  run(7, [](std::ostringstream& msg) {
    bool ok = true;
    int count = 0;
    for (const char* name : {"toy-1f", "toy-1f-g1", "toy-3f", "toy-3f-g1", "bloch-1f", "bloch-3f"}) {
      const Problem p = make_preset(name);
      for (int n : {1, 2}) {
        const auto dec = iterate(p.field, n);
        const auto rep = verify_bounds(dec, p.field, dec.eps_n / 2);
        ++count;
        if (p.field.q != 3 || rep.checks.size() != 5 || !rep.all_pass()) {
          ok = false;
          msg << name << " n=" << n << " failed; ";
        }
      }
    }
    msg << count << " decompositions, 5 checks each, q = 3";
    return ok;
  });

  // 8. Bloch uniform accuracy against a fine EEint reference.
  run(8, [](std::ostringstream& msg) {
    const auto t0 = Clock::now();
    const std::vector<long> steps{20, 40, 80, 160, 320, 640, 1250, 2500, 5000, 10000, 20000};
    const auto epss = geometric_grid(0.5, 1e-4, 13);
    bool ok = true;

    // Reference accuracy: change under halving dt_ref, at the ends and middle of the eps grid.
    double ref_change = 0.0;
    for (const char* name : {"bloch-1f", "bloch-3f"}) {
      const Problem p = make_preset(name);
      for (double eps : {0.5, 0.01, 1e-4}) {
        const auto a = fine_reference(p, eps, 5e-6, {20000});
        const auto b = fine_reference(p, eps, 2.5e-6, {20000});
        for (long l = 0; l <= 20000; ++l) ref_change = std::max(ref_change, l1norm(a.at(l, 20000) - b.at(l, 20000)));
      }
    }
    const double accuracy = 2.0 * ref_change;
    msg << "reference change under dt_ref/2 " << fmt(ref_change) << " (floor " << fmt(10 * accuracy) << "); ";
    ok = ok && ref_change < 1e-5;

    for (const char* name : {"bloch-1f", "bloch-3f"}) {
      const Problem p = make_preset(name);
      const auto dec = iterate(p.field, 1);
      ReferenceCache cache;
      SweepConfig c;
      c.problem = name;
      c.order = 1;
      c.reference = ReferenceKind::fine_EEint;
      c.reference_accuracy = accuracy;
      c.eps = epss;
      c.steps = steps;
      c.scheme = Scheme::EE;
      const auto ee = run_sweep(c, p, &dec, &cache);
      const auto s = summarize(ee, accuracy, 0.1);
      msg << name << " n=1 EE slope " << fmt(s.global) << " (per eps " << fmt(s.slope_min) << ".." << fmt(s.slope_max)
          << "), spread(eps<=0.1) " << fmt(s.spread) << "; ";
      ok = ok && within(s.global, 1.0, 0.15) && within(s.slope_min, 1.0, 0.15) && within(s.slope_max, 1.0, 0.15) &&
           s.spread <= 4.0;
      for (const auto& r : ee) ok = ok && !r.blowup();

      if (std::string(name) == "bloch-1f") {
        c.scheme = Scheme::RK2int;
        c.steps = {20, 40, 80, 160, 320, 640, 1250, 2500};  // dt >= 3e-3
        const auto rk = run_sweep(c, p, &dec, &cache);
        const auto t = summarize(rk, accuracy);
        msg << name << " n=1 RK2int slope " << fmt(t.global) << " (per eps " << fmt(t.slope_min) << ".."
            << fmt(t.slope_max) << "); ";
        ok = ok && within(t.global, 2.0, 0.25) && within(t.slope_min, 2.0, 0.25) && within(t.slope_max, 2.0, 0.25);
      }
    }
    const double dt = seconds_since(t0);
    msg << fmt(dt) << " s";
    return ok && dt < 600.0;
  });

  // 9. Population sum is conserved.
  run(9, [](std::ostringstream& msg) {
    double dev = 0.0;
    int runs = 0;
    for (const char* name : {"bloch-1f", "bloch-3f"}) {
      const Problem p = make_preset(name);
      const auto dec = iterate(p.field, 1);
      for (Scheme s : {Scheme::EE, Scheme::RK2})
        for (long L : {20L, 2000L, 1000000L})
          for (double eps : {0.5, 1e-2, 1e-4}) {
            if (L == 1000000L && eps != 1e-2) continue;
            const double ee = p.engine_eps(eps);
            const long stride = L >= 100000 ? 100 : 1;
            for (const auto& tr : {solve_micro_macro(dec, p.field, p.u0, p.T, L, ee, s, stride),
                                   solve_direct(p.field, p.u0, p.T, L, ee, s, stride)}) {
              ++runs;
              if (tr.blowup) continue;
              for (const auto& u : tr.u) dev = std::max(dev, std::abs(u.sum() - 1.0));
            }
          }
    }
    msg << runs << " EE/RK2 trajectories up to 1e6 steps, max |sum rho - 1| " << fmt(dev);
    return dev <= 1e-10;
  });

  // 10. Closed-form kernel averages and quadrature of the transition rate.
  run(10, [](std::ostringstream& msg) {
    const BlochConfig c = BlochConfig::one_frequency();
    const auto inf = bloch_psi_inf(c);
    const FrequencyVector f = inf.freq();
    double worst = (average(inf) - bloch_psi_average(c)).cwiseAbs().maxCoeff();
    const auto ups_engine = zero_mean_primitive(inf - ExpTrigPoly::constant(f, average(inf))) +
                            ExpTrigPoly::constant(f, bloch_upsilon_average(c));
    const auto ups = bloch_upsilon_inf(c);
    worst = std::max(worst, coefficient_distance(ups, ups_engine));
    for (Eigen::Index l = 0; l < 3; ++l)
      for (Eigen::Index j = 0; j < 3; ++j)
        for (Eigen::Index k = 0; k < 3; ++k)
          for (Eigen::Index i = 0; i < 3; ++i) {
            if (l == j || k == i) continue;
            const cplx got = average(entry(inf, l, j) * entry(ups_engine, k, i))(0, 0);
            worst = std::max(worst, std::abs(got - bloch_psi_upsilon_average(c, l, j, k, i)));
          }
    double quad = 0.0;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> tau(0.0, 10.0);
    for (const auto& cfg : {BlochConfig::one_frequency(), BlochConfig::three_frequencies()}) {
      const auto psi = bloch_psi(cfg, true);
      for (int k = 0; k < 20; ++k) {
        const double s = tau(rng);
        const Matrix got = evaluate(psi, s);
        for (Eigen::Index l = 0; l < 3; ++l)
          for (Eigen::Index j = l + 1; j < 3; ++j) {
            const double ref = oracle::bloch_psi(s, cfg.energies[l] - cfg.energies[j], cfg.gamma(l, j),
                                                 std::norm(cfg.dipole(l, j)), cfg.E0, cfg.omega);
            quad = std::max(quad, std::abs(got(l, j) - ref) / std::abs(ref));
          }
      }
    }
    msg << "closed forms " << fmt(worst) << ", quadrature relative " << fmt(quad);
    return worst <= 1e-12 && quad <= 1e-8;
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
