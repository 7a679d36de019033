// mmavg: decompose, solve, sweep, verify, fit.

#include "mmavg/mmavg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace mmavg;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  return json::parse(in);
}

/// A preset name or a path to a problem JSON file.
Problem load_problem(const std::string& name) {
  if (std::filesystem::exists(name)) return problem_from_json(load_json(name));
  return make_preset(name);
}

SweepMode parse_mode(const std::string& s) { return sweep_mode_from_string(s); }

int cmd_decompose(const std::string& problem, int order, double c, const std::string& out) {
  const Problem p = load_problem(problem);
  const auto dec = iterate(p.field, order, c);
  if (out.empty() || out == "-")
    std::cout << to_json(dec).dump(1) << '\n';
  else
    save_decomposition(dec, out);
  std::fprintf(stderr, "%s n=%d eps_n=%.6g (engine eps)\n", p.name.c_str(), order, dec.eps_n);
  return 0;
}

struct SolveArgs {
  std::string problem = "toy-3f";
  std::string scheme = "EE";
  std::string mode = "micro_macro";
  std::string decomposition;
  std::string out;
  double eps = 0.1;
  double dt = 0.01;
  int order = 1;
  double c = 0.5;
  long stride = 1;
};

int cmd_solve(const SolveArgs& a) {
  const Problem p = load_problem(a.problem);
  const Scheme s = scheme_from_string(a.scheme);
  const SweepMode mode = parse_mode(a.mode);
  const long L = steps_from_dt({a.dt}, p.T).front();
  const double ee = p.engine_eps(a.eps);
  Trajectory tr;
  if (mode == SweepMode::direct) {
    tr = solve_direct(p.field, p.u0, p.T, L, ee, s, a.stride);
  } else {
    const auto dec = a.decomposition.empty() ? iterate(p.field, a.order, a.c) : load_decomposition(a.decomposition);
    tr = solve_micro_macro(dec, p.field, p.u0, p.T, L, ee, s, a.stride);
    if (tr.eps_exceeds_threshold)
      std::fprintf(stderr, "warning: eps %.6g exceeds eps_n %.6g, no guarantee on the decomposition\n", ee, dec.eps_n);
  }
  if (a.out.empty() || a.out == "-")
    write_trajectory_csv(tr, std::cout);
  else
    write_trajectory_csv(tr, a.out);
  if (p.exact && a.stride == 1) {
    const double e = compute_error(tr, exact_reference(p, a.eps), mode == SweepMode::macro_only);
    std::fprintf(stderr, "error vs exact solution: %.6g\n", e);
  }
  if (tr.blowup) {
    std::fprintf(stderr, "blowup\n");
    return 1;
  }
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string out;
  std::string series_dt;
  std::string series_eps;
};

int cmd_sweep(const SweepArgs& a) {
  json j = load_json(a.config);
  // "problem" may also name a problem file relative to the config
  if (j.contains("problem") && j["problem"].is_string()) {
    const auto rel = std::filesystem::path(a.config).parent_path() / j["problem"].get<std::string>();
    if (std::filesystem::is_regular_file(rel)) j["problem"] = load_json(rel.string());
  }
  const auto cfg = sweep_config_from_json(j);
  const auto recs = run_sweep(cfg);
  if (a.out.empty() || a.out == "-")
    write_records_csv(recs, std::cout);
  else
    write_records_csv(recs, a.out);
  if (!a.series_dt.empty()) write_series(recs, true, a.series_dt);
  if (!a.series_eps.empty()) write_series(recs, false, a.series_eps);
  return 0;
}

struct VerifyArgs {
  std::vector<std::string> problems;
  std::vector<int> orders{1, 2};
  double c = 0.5;
  double eps = -1.0;       ///< engine eps; < 0 means eps_n * fraction
  double fraction = 0.5;
};

int cmd_verify(const VerifyArgs& a) {
  bool ok = true;
  const auto problems = a.problems.empty() ? preset_names() : a.problems;
  for (const auto& name : problems) {
    const Problem p = load_problem(name);
    for (int n : a.orders) {
      const auto dec = iterate(p.field, n, a.c);
      const double eps = a.eps > 0.0 ? a.eps : a.fraction * dec.eps_n;
      std::printf("%s n=%d eps=%.6g eps_n=%.6g q=%d\n", p.name.c_str(), n, eps, dec.eps_n, p.field.q);
      if (eps > dec.eps_n) {
        std::printf("  warning: eps exceeds eps_n, bounds not checked\n");
        ok = false;
      } else {
        const auto rep = verify_bounds(dec, p.field, eps);
        for (const auto& c : rep.checks) {
          std::printf("  %-4s %-20s grid=%.4g certified=%.4g rhs=%.4g\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                      c.grid, c.certified, c.rhs);
          ok = ok && c.pass;
        }
      }
      for (const auto& c : check_invariants(dec, p.field, eps)) {
        std::printf("  %-4s %-20s %.3g (tol %.3g)\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.tol);
        ok = ok && c.pass;
      }
    }
  }
  std::printf("%s\n", ok ? "all checks passed" : "some checks failed");
  return ok ? 0 : 1;
}

struct FitArgs {
  std::string csv;
  double accuracy = 0.0;
  double floor_factor = 10.0;
  bool per_eps = false;
  double expect = std::numeric_limits<double>::quiet_NaN();
  double tol = 0.2;
  double max_spread = 0.0;
  double spread_eps_max = std::numeric_limits<double>::infinity();
};

int cmd_fit(const FitArgs& a) {
  const auto recs = read_records_csv(a.csv);
  bool ok = true;
  auto judge = [&](double slope) {
    if (std::isnan(a.expect)) return true;
    return std::abs(slope - a.expect) <= a.tol;
  };
  const auto g = fit_order(recs, a.accuracy, a.floor_factor);
  const bool gok = judge(g.slope);
  ok = ok && gok;
  std::printf("global slope %.4f (%zu points, %zu excluded)%s\n", g.slope, g.used, g.excluded, gok ? "" : " FAIL");
  if (a.per_eps)
    for (const auto& [eps, f] : fit_order_by_eps(recs, a.accuracy, a.floor_factor)) {
      const bool fok = judge(f.slope);
      ok = ok && fok;
      std::printf("eps=%-12.6g slope %.4f (%zu points)%s\n", eps, f.slope, f.used, fok ? "" : " FAIL");
    }
  if (a.max_spread > 0.0) {
    std::vector<ErrorRecord> sub;
    for (const auto& r : recs)
      if (r.eps <= a.spread_eps_max) sub.push_back(r);
    for (const auto& [dt, s] : eps_spread_by_dt(sub)) {
      const bool sok = s <= a.max_spread;
      ok = ok && sok;
      std::printf("dt=%-12.6g eps spread %.4g%s\n", dt, s, sok ? "" : " FAIL");
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"micro-macro averaging for oscillatory linear ODEs"};
  app.require_subcommand(1);

  std::string d_problem = "toy-3f", d_out;
  int d_order = 1;
  double d_c = 0.5;
  auto* dec = app.add_subcommand("decompose", "build and serialize a decomposition");
  dec->add_option("--problem", d_problem, "preset name or problem JSON file");
  dec->add_option("--order", d_order, "order n")->check(CLI::Range(0, 64));
  dec->add_option("--c", d_c, "contraction constant in (0, 1)");
  dec->add_option("--out", d_out, "output JSON (stdout if omitted)");

  SolveArgs s;
  auto* sol = app.add_subcommand("solve", "one trajectory as CSV");
  sol->add_option("--problem", s.problem, "preset name or problem JSON file");
  sol->add_option("--scheme", s.scheme, "EE, EEint, RK2 or RK2int");
  sol->add_option("--eps", s.eps, "eps")->required();
  sol->add_option("--dt", s.dt, "time step, must divide T")->required();
  sol->add_option("--mode", s.mode, "micro_macro, macro_only or direct");
  sol->add_option("--order", s.order, "order n of the decomposition");
  sol->add_option("--c", s.c, "contraction constant");
  sol->add_option("--decomposition", s.decomposition, "decomposition JSON from 'decompose'");
  sol->add_option("--stride", s.stride, "keep every k-th step");
  sol->add_option("--out", s.out, "output CSV (stdout if omitted)");

  SweepArgs w;
  auto* swp = app.add_subcommand("sweep", "error study over an (eps, dt) grid");
  swp->add_option("--config", w.config, "sweep config JSON")->required()->check(CLI::ExistingFile);
  swp->add_option("--out", w.out, "records CSV (stdout if omitted)");
  swp->add_option("--series-by-dt", w.series_dt, "plot data, one series per dt");
  swp->add_option("--series-by-eps", w.series_eps, "plot data, one series per eps");

  VerifyArgs v;
  auto* ver = app.add_subcommand("verify", "defect bounds and decomposition invariants");
  ver->add_option("--problem", v.problems, "presets or files (all presets if omitted)");
  ver->add_option("--order", v.orders, "orders to check");
  ver->add_option("--c", v.c, "contraction constant");
  auto* eps_opt = ver->add_option("--eps", v.eps, "engine eps to check at");
  ver->add_option("--fraction", v.fraction, "check at fraction * eps_n")->excludes(eps_opt);

  FitArgs f;
  auto* fit = app.add_subcommand("fit", "order fit on a records CSV");
  fit->add_option("csv", f.csv, "records CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--accuracy", f.accuracy, "reference accuracy");
  fit->add_option("--floor-factor", f.floor_factor, "drop errors below factor * accuracy");
  fit->add_flag("--per-eps", f.per_eps, "also fit each eps separately");
  fit->add_option("--expect", f.expect, "expected slope; fail if off by more than --tol");
  fit->add_option("--tol", f.tol, "slope tolerance");
  fit->add_option("--max-spread", f.max_spread, "fail if the per-dt max/min error ratio exceeds this");
  fit->add_option("--spread-eps-max", f.spread_eps_max, "only eps up to this value enter the spread");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dec) return cmd_decompose(d_problem, d_order, d_c, d_out);
    if (*sol) return cmd_solve(s);
    if (*swp) return cmd_sweep(w);
    if (*ver) return cmd_verify(v);
    if (*fit) return cmd_fit(f);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
