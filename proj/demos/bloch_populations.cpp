// Populations of the three-level transition rate model, micro-macro RK2int
// against a direct run with a fine step.
//
//   bloch_populations [eps] [dt]

#include "mmavg/mmavg.hpp"

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  using namespace mmavg;
  const double eps = argc > 1 ? std::stod(argv[1]) : 0.01;
  const double dt = argc > 2 ? std::stod(argv[2]) : 0.05;

  try {
    const Problem p = make_preset("bloch-1f");
    const auto dec = iterate(p.field, 1);
    const long L = steps_from_dt({dt}, p.T).front();
    const double ee = p.engine_eps(eps);
    const auto mm = solve_micro_macro(dec, p.field, p.u0, p.T, L, ee, Scheme::RK2int);
    const auto ref = fine_reference(p, eps, 5e-6, {L});

    std::printf("eps = %g, fast time t/eps^2, dt = %g, eps^2 = %.4g, eps_n = %.4g\n\n", eps, dt, ee, dec.eps_n);
    std::printf("%6s  %10s %10s %10s  %10s\n", "t", "rho_1", "rho_2", "rho_3", "|err|_1");
    const long every = std::max(1L, L / 10);
    for (std::size_t k = 0; k < mm.size(); k += static_cast<std::size_t>(every)) {
      const Vector& u = mm.u[k];
      const double err = l1norm(u - ref.at(mm.index[k], L));
      std::printf("%6.2f  %10.6f %10.6f %10.6f  %10.2e\n", mm.t[k], u[0].real(), u[1].real(), u[2].real(), err);
    }
    std::printf("\nmax error %.3e\n", compute_error(mm, ref));
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
