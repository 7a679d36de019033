#include "mmavg/engine/decomposition.hpp"
#include "mmavg/integrators/solve.hpp"
#include "mmavg/models/problem.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mmavg;

namespace {

double sum_entries(const Vector& x) { return x.sum().real(); }

}  // namespace

TEST(Toy, FieldTerms) {
  const auto a = toy_a(ToyConfig::one_frequency(0.7));
  const auto& f = a.freq();
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(*a.find(Mode{{0}, {}}), Matrix::Constant(1, 1, -1.0));
  EXPECT_EQ(*a.find(Mode{{1}, {}}), Matrix::Constant(1, 1, 0.5));
  EXPECT_EQ(*a.find(Mode{{-1}, {}}), Matrix::Constant(1, 1, 0.5));
  EXPECT_EQ(*a.find(Mode{{0}, -1.0}), Matrix::Constant(1, 1, 0.7));
  EXPECT_EQ(average(a)(0, 0), cplx(-1.0));
  EXPECT_DOUBLE_EQ(norm_kappa(a, 0.0), 2.7);
  EXPECT_EQ(f.omega, std::vector<double>{M_PI});
  const auto a3 = toy_a(ToyConfig::three_frequencies(1.0));
  EXPECT_EQ(a3.freq().rank(), 3u);
  EXPECT_EQ(a3.freq().nu, 2.0);
  EXPECT_DOUBLE_EQ(norm_kappa(a3, 0.0), 3.0);
}

TEST(Toy, ExactAndLimit) {
  const ToyConfig c = ToyConfig::one_frequency();
  EXPECT_EQ(toy_exact(c, 0.3, 0.0), 1.0);
  EXPECT_NEAR(toy_exact(c, 0.5, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_EQ(toy_limit(c, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(toy_limit(c, 1.0), 1.0 / std::exp(1.0));
  EXPECT_THROW(toy_exact(c, 0.0, 1.0), DomainError);

  // |exact - limit| <= C eps with one C for every eps.
  const ToyConfig g = ToyConfig::three_frequencies(1.0);
  std::vector<double> C;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
    double s = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double t = g.T * k / 20000.0;
      s = std::max(s, std::abs(toy_exact(g, eps, t) - toy_limit(g, t)));
    }
    C.push_back(s / eps);
  }
  const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
  EXPECT_LE(*hi, 2.0 * *lo);
  EXPECT_LE(*hi, 3.0);
}

TEST(Toy, ExactMatchesFineDirectSolve) {
  for (const auto& base : {ToyConfig::one_frequency(1.0), ToyConfig::three_frequencies(1.0)}) {
    ToyConfig cfg = base;
    cfg.T = 1.0;
    const auto field = toy_field(cfg);
    for (double eps : {0.1, 0.01}) {
      const auto tr = solve_direct(field, Vector::Constant(1, 1.0), cfg.T, 1000000, eps, Scheme::RK2int, 1000);
      for (std::size_t k = 0; k < tr.size(); ++k)
        EXPECT_NEAR(tr.u[k][0].real(), toy_exact(cfg, eps, tr.t[k]), 1e-8);
    }
  }
}

TEST(Toy, RejectsBadConfig) {
  ToyConfig c;
  c.omega = {};
  EXPECT_THROW(toy_field(c), ValidationError);
  c.omega = {1.0, 2.0};
  EXPECT_THROW(toy_field(c), ResonanceError);
  c.omega = {1.0};
  c.T = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Bloch, RSExamples) {
  const BlochConfig c = BlochConfig::one_frequency();
  const cplx Om = c.Omega(0, 1);
  EXPECT_EQ(Om, cplx(-1.0, 2.0));
  const double g = 1.0, dE = -2.0, w = M_PI;
  const double half = 0.5 * g * (1.0 / (g * g + (w + dE) * (w + dE)) + 1.0 / (g * g + (w - dE) * (w - dE)));
  EXPECT_NEAR(bloch_RS(0.0, w, Om).S, half, 1e-15);
  EXPECT_NEAR(bloch_RS(0.0, w, c.Omega(1, 0)).S, half, 1e-15);
  // Same value through -Re(Omega/(omega^2 + Omega^2)) written out by hand.
  const double re = -Om.real(), im = -Om.imag();
  const double dr = w * w + re * re - im * im, di = 2 * re * im;
  EXPECT_NEAR(bloch_RS(0.0, w, Om).S, (re * dr + im * di) / (dr * dr + di * di), 1e-15);
  EXPECT_NEAR(half, 0.235311, 1e-6);
  const RS far = bloch_RS(60.0, w, Om);
  EXPECT_LE(std::abs(far.R) + std::abs(far.S), 1e-25);
  EXPECT_THROW(bloch_RS(0.0, 2.0, cplx(0.0, -2.0)), ResonanceError);
}

TEST(Bloch, AveragesAndMonochromaticForm) {
  for (const auto& cfg : {BlochConfig::one_frequency(), BlochConfig::three_frequencies()}) {
    const auto inf = bloch_psi_inf(cfg);
    EXPECT_LE((average(inf) - bloch_psi_average(cfg)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((average(bloch_psi(cfg)) - bloch_psi_average(cfg)).cwiseAbs().maxCoeff(), 1e-15);
  }
  const BlochConfig c = BlochConfig::one_frequency();
  const FrequencyVector f = bloch_psi_inf(c).freq();
  const auto cs = ExpTrigPoly::cos_mode(f, 0), sn = ExpTrigPoly::sin_mode(f, 0);
  for (Eigen::Index l = 0; l < 3; ++l)
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (l == j) continue;
      const RS rs = bloch_RS(0.0, M_PI, c.Omega(l, j));
      const auto expect = cplx(2.0) * (cplx(rs.R) * (cs * sn) + cplx(rs.S) * (cs * cs));
      EXPECT_LE(coefficient_distance(entry(bloch_psi_inf(c), l, j), expect), 1e-15);
    }
}

TEST(Bloch, PsiMatchesQuadrature) {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> tau(0.0, 10.0);
  for (const auto& cfg : {BlochConfig::one_frequency(), BlochConfig::three_frequencies()}) {
    const auto psi = bloch_psi(cfg, true);
    for (int k = 0; k < 20; ++k) {
      const double s = tau(rng);
      const Matrix got = evaluate(psi, s);
      for (auto [l, j] : {std::pair<Eigen::Index, Eigen::Index>{0, 1}, {0, 2}, {1, 2}}) {
        const double dE = cfg.energies[l] - cfg.energies[j];
        const double ref = oracle::bloch_psi(s, dE, cfg.gamma(l, j), std::norm(cfg.dipole(l, j)), cfg.E0, cfg.omega);
        EXPECT_LE(std::abs(got(l, j) - ref), 1e-8 * std::abs(ref)) << "tau=" << s;
      }
    }
  }
}

TEST(Bloch, Structure) {
  for (const auto& cfg : {BlochConfig::one_frequency(), BlochConfig::three_frequencies()}) {
    const auto psi = bloch_psi(cfg, true);
    const auto a = bloch_rate_matrix(psi);
    const auto& f = psi.freq();
    // Column sums are the zero polynomial.
    for (Eigen::Index j = 0; j < 3; ++j) {
      ExpTrigPoly s(f, 1, 1);
      for (Eigen::Index i = 0; i < 3; ++i) s = s + entry(a, i, j);
      EXPECT_LE(s.max_coefficient(), 1e-16) << s.size();
    }
    // Symmetry and realness.
    for (Eigen::Index l = 0; l < 3; ++l)
      for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(coefficient_distance(entry(psi, l, j), entry(psi, j, l)), 0.0);
    for (double s : {0.0, 0.37, 2.9, 8.1}) {
      EXPECT_LE(evaluate(psi, s).imag().cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE(evaluate(a, s).imag().cwiseAbs().maxCoeff(), 1e-10);
    }
    // Dropping the flat part gives the stationary rates.
    EXPECT_EQ(coefficient_distance(sharp_part(psi), bloch_psi_inf(cfg)), 0.0);
    EXPECT_EQ(coefficient_distance(bloch_psi(cfg, false), bloch_psi_inf(cfg)), 0.0);
  }
  const auto field = bloch_field(BlochConfig::one_frequency());
  EXPECT_DOUBLE_EQ(field.flat_rate, 1.0);
}

TEST(Bloch, TwoLevelRateMatrix) {
  const auto f = FrequencyVector::mono(1.0);
  const auto p = ExpTrigPoly::scalar(f, 0.3) + ExpTrigPoly::cos_mode(f, 0, 0.1);
  Matrix e(2, 2);
  e << 0, 1, 1, 0;
  const auto a = bloch_rate_matrix(outer(p, e));
  EXPECT_EQ(coefficient_distance(entry(a, 0, 0), -p), 0.0);
  EXPECT_EQ(coefficient_distance(entry(a, 0, 1), p), 0.0);
  EXPECT_EQ(coefficient_distance(entry(a, 1, 0), p), 0.0);
  EXPECT_EQ(coefficient_distance(entry(a, 1, 1), -p), 0.0);
}

TEST(Bloch, LimitDynamicsAndNullSpace) {
  for (const auto& cfg : {BlochConfig::one_frequency(), BlochConfig::three_frequencies()}) {
    const auto field = bloch_field(cfg);
    const auto dec = iterate(field, 0);
    Matrix psi_bar = bloch_psi_average(cfg);
    const Matrix lim = evaluate(bloch_rate_matrix(ExpTrigPoly::constant(field.freq(), psi_bar)), 0.0);
    EXPECT_LE((dec.A_at(0.01) - lim).cwiseAbs().maxCoeff(), 1e-12);
    // Brute-force null space of <a>: the uniform distribution.
    Eigen::JacobiSVD<Matrix> svd(lim, Eigen::ComputeFullV);
    EXPECT_LE(svd.singularValues()(2), 1e-13);
    EXPECT_GT(svd.singularValues()(1), 1e-3);
    Vector v = svd.matrixV().col(2);
    v /= v.sum();
    for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(v[i] - 1.0 / 3.0), 0.0, 1e-12);
  }
}

TEST(Bloch, UpsilonClosedForms) {
  const BlochConfig c = BlochConfig::one_frequency();
  const auto inf = bloch_psi_inf(c);
  const auto& f = inf.freq();
  const Matrix avg = bloch_psi_average(c);
  const auto ups_engine = zero_mean_primitive(inf - ExpTrigPoly::constant(f, avg)) +
                          ExpTrigPoly::constant(f, bloch_upsilon_average(c));
  const auto ups = bloch_upsilon_inf(c);
  EXPECT_LE(coefficient_distance(ups, ups_engine), 1e-12);
  EXPECT_LE((average(ups) - bloch_upsilon_average(c)).cwiseAbs().maxCoeff(), 1e-15);
  for (Eigen::Index l = 0; l < 3; ++l)
    for (Eigen::Index j = 0; j < 3; ++j)
      for (Eigen::Index k = 0; k < 3; ++k)
        for (Eigen::Index i = 0; i < 3; ++i) {
          if (l == j || k == i) continue;
          const cplx got = average(entry(inf, l, j) * entry(ups, k, i))(0, 0);
          EXPECT_NEAR(std::abs(got - bloch_psi_upsilon_average(c, l, j, k, i)), 0.0, 1e-12);
        }
  const auto cs = ExpTrigPoly::cos_mode(f, 0), sn = ExpTrigPoly::sin_mode(f, 0);
  EXPECT_NEAR(std::abs(average(cs * sn * sn * sn)(0, 0)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(average(cs * cs * cs * sn)(0, 0)), 0.0, 1e-16);
  EXPECT_THROW(bloch_upsilon_inf(BlochConfig::three_frequencies()), ValidationError);
}

TEST(Bloch, PopulationSumIsConserved) {
  const auto p = make_preset("bloch-1f");
  const auto dec = iterate(p.field, 1);
  for (Scheme s : {Scheme::EE, Scheme::RK2}) {
    for (double eps : {0.3, 0.05}) {
      const double ee = p.engine_eps(eps);
      const auto mm = solve_micro_macro(dec, p.field, p.u0, p.T, 4000, ee, s);
      const auto dr = solve_direct(p.field, p.u0, p.T, 4000, ee, s);
      for (const auto& u : mm.u) EXPECT_NEAR(sum_entries(u), 1.0, 1e-10);
      for (const auto& u : dr.u) EXPECT_NEAR(sum_entries(u), 1.0, 1e-10);
    }
  }
}

TEST(Bloch, RejectsBadConfig) {
  BlochConfig c = BlochConfig::one_frequency();
  c.rho_init = {0.5, 0.5, 0.5};
  EXPECT_THROW(c.validate(), ValidationError);
  c = BlochConfig::one_frequency();
  c.gamma(0, 1) = 2.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = BlochConfig::one_frequency();
  c.dipole(0, 1) = cplx(1.0, 1.0);
  EXPECT_THROW(c.validate(), ValidationError);
  c = BlochConfig::one_frequency();
  c.gamma(1, 1) = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Problem, PresetsAndJson) {
  for (const auto& n : preset_names()) {
    const auto p = make_preset(n);
    EXPECT_EQ(p.name, n);
    EXPECT_EQ(p.u0.size(), p.field.dim());
  }
  EXPECT_EQ(make_preset("bloch-1f").engine_eps(0.1), 0.1 * 0.1);
  EXPECT_EQ(make_preset("toy-3f").engine_eps(0.1), 0.1);
  EXPECT_FALSE(make_preset("bloch-3f").exact);
  EXPECT_THROW(make_preset("nope"), ValidationError);

  const auto t = problem_from_json(json::parse(R"({"kind":"toy","omega":[1.0,1.4142135623730951],"gamma":0.5,"T":2})"));
  EXPECT_EQ(t.field.freq().rank(), 2u);
  EXPECT_EQ(t.T, 2.0);
  EXPECT_NEAR(t.exact(0.1, 0.0)[0].real(), 1.0, 1e-15);
  EXPECT_EQ(problem_from_json(json("toy-1f")).name, "toy-1f");
  EXPECT_EQ(problem_from_json(json::parse(R"({"preset":"bloch-3f"})")).time_scale_power, 2);

  const auto b = problem_from_json(json::parse(R"({"kind":"bloch","energies":[0,1],
      "gamma":[[0,0.5],[0.5,0]],"dipole":[[0,1],[1,0]],"omega":[2.5],"rho_init":[1,0]})"));
  EXPECT_EQ(b.field.dim(), 2);
  EXPECT_THROW(problem_from_json(json::parse(R"({"kind":"heat"})")), ValidationError);
}
