// Error against dt and eps for the scalar toy problem, with fitted orders.
//
//   toy_order_study [preset] [order] [scheme]
//   toy_order_study toy-3f 2 RK2

#include "mmavg/mmavg.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  using namespace mmavg;
  SweepConfig cfg;
  cfg.problem = argc > 1 ? argv[1] : "toy-3f";
  cfg.order = argc > 2 ? std::stoi(argv[2]) : 2;
  cfg.scheme = scheme_from_string(argc > 3 ? argv[3] : "RK2");
  cfg.eps = geometric_grid(0.5, 1e-4, 9);
  cfg.steps = {32, 64, 128, 256, 512, 1024, 2048};

  try {
    const auto recs = run_sweep(cfg);
    std::printf("%-10s", "dt \\ eps");
    for (double e : cfg.eps) std::printf(" %9.2e", e);
    std::printf("\n");
    for (auto it = cfg.steps.rbegin(); it != cfg.steps.rend(); ++it) {
      const double dt = 10.0 / static_cast<double>(*it);
      std::printf("%-10.4g", dt);
      for (double e : cfg.eps)
        for (const auto& r : recs)
          if (r.eps == e && r.dt == dt) std::printf(" %9.2e", r.error);
      std::printf("\n");
    }
    const auto fit = fit_order(recs, 1e-13);
    std::printf("\nfitted order %.3f over %zu points\n", fit.slope, fit.used);
    double worst = 0.0;
    for (const auto& [dt, s] : eps_spread_by_dt(recs)) worst = std::max(worst, s);
    std::printf("largest max/min error ratio across eps at fixed dt: %.3f\n", worst);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
