#include <gtest/gtest.h>

#include <random>

#include "subrad/asymptotics.hpp"

using namespace subrad;

TEST(Asymptotics, BlochActionRandomCases) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> phase(0.05, 0.95), wave(-pi, pi);
  for (int t = 0; t < 20; ++t) {
    const ChainConfig c = ChainConfig::waveguide(3 + static_cast<int>(rng() % 48), phase(rng) * pi);
    double k = wave(rng);
    if (BlochTheory(c).pole_distance(k) < 1e-3) k += 0.05;
    EXPECT_LT(bloch_action_check(c, k).residual, 1e-10);
  }
}

TEST(Asymptotics, TailAmplitudesFromSiteSums) {
  // For site n, sum_{m<=n} e^{ia(n-m)} e^{ikm} = e^{ian} g_k + (bulk e^{ikn} term) and
  // sum_{m>n} e^{ia(m-n)} e^{ikm} = -e^{-ian} h_k + (bulk e^{ikn} term).
  const int n_atoms = 23;
  const ChainConfig c = ChainConfig::waveguide(n_atoms, 0.31 * pi);
  const BlochTheory th(c);
  const double a = c.wavenumber();
  for (double k : {0.2, 1.3, -2.0})
    for (int n : {0, 5, 22}) {
      cplx left{}, right{};
      for (int m = 0; m <= n; ++m) left += std::exp(I * a * double(n - m)) * std::exp(I * k * double(m));
      for (int m = n + 1; m < n_atoms; ++m) right += std::exp(I * a * double(m - n)) * std::exp(I * k * double(m));
      const cplx bulk_l = -std::exp(I * k * double(n)) * std::exp(I * (k - a)) * th.g(k);
      const cplx bulk_r = std::exp(I * k * double(n)) * std::exp(I * (k + a)) / (1.0 - std::exp(I * (k + a)));
      EXPECT_LT(std::abs(left - (std::exp(I * a * double(n)) * th.g(k) + bulk_l)), 1e-12);
      EXPECT_LT(std::abs(right - (-std::exp(-I * a * double(n)) * th.h(k) + bulk_r)), 1e-12);
    }
}

TEST(Asymptotics, TailConditionDerivativeMatchesFiniteDifference) {
  const ChainConfig c = ChainConfig::waveguide(30, 0.43 * pi);
  const BlochTheory th(c);
  for (cplx k : {cplx(0.1, -0.01), cplx(-3.0, 0.02), cplx(0.7, 0.0)}) {
    const double h = 1e-6;
    const cplx fd = (th.tail_condition(k + h) - th.tail_condition(k - h)) / (2 * h);
    const cplx fdi = (th.tail_condition(k + I * h) - th.tail_condition(k - I * h)) / (2.0 * I * h);
    const cplx an = th.tail_condition_prime(k);
    EXPECT_LT(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an)));
    EXPECT_LT(std::abs(fdi - an), 1e-6 * std::max(1.0, std::abs(an)));  // analytic: Cauchy-Riemann
  }
}

TEST(Asymptotics, NewtonRootApproachesClosedForm) {
  for (Branch b : {Branch::Center, Branch::Edge}) {
    double prev = 1e9;
    for (int n : {50, 100, 200}) {
      const ChainConfig c = ChainConfig::waveguide(n, 0.4 * pi);
      const ComplexWavenumber k = solve_complex_k(c, 1, b);
      EXPECT_LT(k.residual, 1e-12);
      const cplx closed = delta_closed_form(c, 1, b);
      const double err = std::abs(k.delta - closed) / std::abs(closed);
      EXPECT_LT(err, prev);
      prev = err;
    }
    EXPECT_LT(prev, 1e-3);
  }
}

TEST(Asymptotics, NewtonRootMakesAnsatzAnEigenvector) {
  const ChainConfig c = ChainConfig::waveguide(40, 0.3 * pi);
  const CMatrix h = build_waveguide_one_excitation(c).entries;
  const BlochTheory th(c);
  for (Branch b : {Branch::Center, Branch::Edge})
    for (int xi = 1; xi <= 3; ++xi) {
      const AnsatzState s = ansatz_state(c, xi, b);
      const cplx lam = th.omega(s.root.k);
      EXPECT_LT((h * s.exact - lam * s.exact).norm(), 1e-9);
    }
}

TEST(Asymptotics, XiGuardAndBadOptions) {
  const ChainConfig c = ChainConfig::waveguide(20, 0.3 * pi);
  EXPECT_THROW(solve_complex_k(c, 6, Branch::Center), ConfigError);
  EXPECT_THROW(solve_complex_k(c, 0, Branch::Center), ConfigError);
  NewtonOptions bad;
  bad.damping = 1.5;
  EXPECT_THROW(solve_complex_k(c, 1, Branch::Center, bad), ConfigError);
  NewtonOptions starve;
  starve.max_iterations = 1;
  starve.tolerance = 1e-300;
  EXPECT_THROW(solve_complex_k(c, 1, Branch::Center, starve), ConvergenceError);
}

TEST(Asymptotics, DecayRateFormulaAtLargeN) {
  const ChainConfig c = ChainConfig::waveguide(300, 0.4 * pi);
  const SpectralResult r = eigendecompose(build_waveguide_one_excitation(c));
  const auto labels = classify_modes(r, c);
  for (Branch b : {Branch::Center, Branch::Edge})
    for (int xi = 1; xi <= 2; ++xi) {
      const auto m = find_mode(labels, b, xi);
      ASSERT_TRUE(m);
      EXPECT_NEAR(r.decay_rates[*m] / analytic_decay(c, xi, b), 1.0, 0.05);
    }
}

TEST(Asymptotics, ShiftFormsAgreeAtBandOrigin) {
  const ChainConfig c = ChainConfig::waveguide(50, 0.3 * pi);
  const BlochTheory th(c);
  for (Branch b : {Branch::Center, Branch::Edge}) {
    const double origin = detail::branch_origin(c, b);
    EXPECT_NEAR(analytic_shift(c, 0, b), th.omega(origin).real(), 1e-13);
    EXPECT_EQ(analytic_shift(c, 0, b, LambShiftForm::Tabulated), analytic_shift(c, 0, b));
  }
  // curvature form is the second-order Taylor expansion of omega_k around k = 0
  const ChainConfig big = ChainConfig::waveguide(400, 0.3 * pi);
  const double k = pi / 400;
  const double quad = analytic_shift(big, 1, Branch::Center) - analytic_shift(big, 0, Branch::Center);
  EXPECT_NEAR(analytic_shift(big, 1, Branch::Center), BlochTheory(big).omega(k).real(), 1e-3 * quad);
}

TEST(Asymptotics, PowerLawRecoversExactLaw) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> e(-4, 1), p(0.1, 10);
  for (int t = 0; t < 10; ++t) {
    const double ex = e(rng), pre = p(rng);
    std::vector<std::pair<double, double>> s;
    for (double n : {10.0, 20.0, 40.0, 80.0}) s.emplace_back(n, pre * std::pow(n, ex));
    const ScalingFit f = fit_scaling(s);
    EXPECT_NEAR(f.exponent, ex, 1e-12);
    EXPECT_NEAR(f.prefactor, pre, 1e-10 * pre);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(f.predict(33.0), pre * std::pow(33.0, ex), 1e-9 * pre);
  }
  EXPECT_THROW(fit_scaling({{10, 1}, {20, 2}, {40, 3}}), ConfigError);
  EXPECT_THROW(power_law_fit({{10, 1}}), ConfigError);
  EXPECT_THROW(power_law_fit({{10, 1}, {20, -2}}), ConfigError);
}

TEST(Asymptotics, FreeSpaceAboveHalfWavelengthHasNoRegime) {
  const auto rep = universality_check_3d(ChainConfig::free_space(40, 1.2 * pi, Polarization::Transverse), {40, 80}, 2);
  EXPECT_FALSE(rep.subradiant_regime);
  EXPECT_FALSE(rep.note.empty());
}
