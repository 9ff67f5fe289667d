#include <gtest/gtest.h>

#include <random>

#include "subrad/spectral.hpp"

using namespace subrad;

TEST(Spectral, TwoByTwoByHand) {
  // [[a, b], [b, a]] has eigenvalues a +- b with (1, +-1)/sqrt 2
  const cplx a(0.3, -0.7), b(-0.2, 0.25);
  CMatrix h(2, 2);
  h << a, b, b, a;
  const SpectralResult r = eigendecompose(h);
  std::vector<cplx> want{a + b, a - b};
  std::sort(want.begin(), want.end(), [](cplx x, cplx y) { return -x.imag() < -y.imag(); });
  for (int j = 0; j < 2; ++j) EXPECT_LT(std::abs(r.eigenvalues[j] - want[j]), 1e-15);
  for (int j = 0; j < 2; ++j) {
    EXPECT_NEAR(r.vector(j).norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(r.vector(j)(0)), std::sqrt(0.5), 1e-14);
  }
}

TEST(Spectral, SortedByDecayRateWithSmallResiduals) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial * 5;
    CMatrix h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) = cplx(g(rng), g(rng));
    const SpectralResult r = eigendecompose(h);
    for (int j = 1; j < n; ++j) EXPECT_LE(r.decay_rates[j - 1], r.decay_rates[j]);
    EXPECT_LT(r.max_residual(), 1e-12 * r.norm_estimate);
    cplx tr{};
    for (auto l : r.eigenvalues) tr += l;
    EXPECT_LT(std::abs(tr - h.trace()), 1e-11 * n);
  }
}

TEST(Spectral, NormEstimateTracksSpectralNorm) {
  const CMatrix h = build_waveguide_one_excitation(ChainConfig::waveguide(30, 0.3 * pi)).entries;
  Eigen::JacobiSVD<CMatrix> svd(h);
  EXPECT_NEAR(spectral_norm_estimate(h), svd.singularValues()(0), 1e-6 * svd.singularValues()(0));
}

TEST(Spectral, RejectsBadInput) {
  EXPECT_THROW(eigendecompose(CMatrix(2, 3)), Error);
  CMatrix h = CMatrix::Identity(3, 3);
  h(1, 2) = std::nan("");
  EXPECT_THROW(eigendecompose(h), Error);
}

TEST(Spectral, DecaySumRuleRandomChains) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> phase(0.05, 0.95), gam(0.2, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    const double g = gam(rng);
    const SpectralResult r = eigendecompose(build_waveguide_one_excitation(ChainConfig::waveguide(n, phase(rng) * pi, g)));
    double s = 0.0;
    for (double x : r.decay_rates) s += x;
    EXPECT_NEAR(s, n * g, 1e-10 * n * g) << "N = " << n;
  }
}

TEST(Spectral, DissipativeSpectrumClosedForm) {
  // nonzero eigenvalues N Gamma/4 (1 +- |s|), s = N^-1 sum_m e^{-2 i k z_m}
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> phase(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 40);
    const ChainConfig c = ChainConfig::waveguide(n, phase(rng) * pi);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(imag_part(build_waveguide_one_excitation(c)).entries);
    cplx s{};
    for (int m = 0; m < n; ++m) s += std::exp(-2.0 * I * c.wavenumber() * c.position(m));
    s /= double(n);
    EXPECT_NEAR(es.eigenvalues()(n - 1), n / 4.0 * (1 + std::abs(s)), 1e-11 * n);
    EXPECT_NEAR(es.eigenvalues()(n - 2), n / 4.0 * (1 - std::abs(s)), 1e-11 * n);
    for (int j = 0; j < n - 2; ++j) EXPECT_NEAR(es.eigenvalues()(j), 0.0, 1e-11 * n);
  }
}

TEST(Spectral, DarkSplitAnnihilatedByDissipator) {
  const ChainConfig c = ChainConfig::waveguide(17, 0.27 * pi);
  const SectorMatrix hi = imag_part(build_waveguide_one_excitation(c));
  const DarkSplit s = dark_superradiant_split(hi, c);
  EXPECT_EQ(s.dark_rank, 15);
  EXPECT_LT(s.leakage, 1e-13);
  EXPECT_LT((s.superradiant_basis.adjoint() * s.superradiant_basis - CMatrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_THROW(dark_superradiant_split(real_part(build_waveguide_one_excitation(c)), c), Error);
}

TEST(Spectral, FourierPeakOfPlaneWave) {
  const ChainConfig c = ChainConfig::waveguide(40, 0.3 * pi);
  for (double k : {0.25, -1.1, 2.9}) {
    const FourierPeak p = fourier_peak(bloch_vector(c, k), c.spacing);
    EXPECT_NEAR(p.k, k, 2 * pi / (16 * 40));
  }
}

TEST(Spectral, ClassificationCountsAndThreshold) {
  const ChainConfig c = ChainConfig::waveguide(40, 0.5 * pi);
  const SpectralResult r = eigendecompose(build_waveguide_one_excitation(c));
  const auto labels = classify_modes(r, c);
  int sub = 0;
  for (const auto& l : labels) {
    if (l.kind == ModeKind::Subradiant) {
      ++sub;
      EXPECT_LT(l.gamma, 0.5);
    }
    if (l.kind == ModeKind::Superradiant) {
      EXPECT_GE(l.gamma, 0.5);
    }
  }
  EXPECT_GT(sub, 20);
  // most subradiant modes sit at the band edges with rank 1
  ASSERT_TRUE(find_mode(labels, Branch::Center, 1));
  ASSERT_TRUE(find_mode(labels, Branch::Edge, 1));
  const auto e1 = *find_mode(labels, Branch::Edge, 1), e2 = *find_mode(labels, Branch::Edge, 2);
  EXPECT_LT(r.decay_rates[e1], r.decay_rates[e2]);
  EXPECT_GT(std::abs(labels[e1].dominant_k), pi / 2);
}

TEST(Classification, BranchFollowsLightConeOnShortChains) {
  // N = 20, k d = 0.2 pi: a mid-band mode decays slower than the first center
  // mode, and modes with pi/2 > |k| d > k0 d continue the outer band.
  const ChainConfig c = ChainConfig::waveguide(20, 0.2 * pi);
  const SpectralResult r = eigendecompose(build_waveguide_one_excitation(c));
  const auto labels = classify_modes(r, c);
  for (const auto& l : labels) {
    if (l.kind != ModeKind::Subradiant) continue;
    const bool inside = std::abs(l.dominant_k) * c.spacing < c.phase();
    EXPECT_EQ(l.branch == Branch::Center, inside) << "mode " << l.mode;
    // bands are separated by the pole of omega(k): inner band sits above it
    EXPECT_EQ(r.shifts[static_cast<std::size_t>(l.mode)] > 0.0, inside) << "mode " << l.mode;
  }
  const auto c1 = find_mode(labels, Branch::Center, 1);
  ASSERT_TRUE(c1);
  EXPECT_LT(std::abs(labels[*c1].dominant_k), 0.05);
  // xi increases away from the band edge
  const auto c2 = find_mode(labels, Branch::Center, 2);
  ASSERT_TRUE(c2);
  EXPECT_GT(std::abs(labels[*c2].dominant_k), std::abs(labels[*c1].dominant_k));
}
