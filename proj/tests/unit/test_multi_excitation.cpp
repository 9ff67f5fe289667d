#include <gtest/gtest.h>

#include <random>

#include "subrad/multi_excitation.hpp"

using namespace subrad;

namespace {

CVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

} // namespace

TEST(MultiExcitation, AnsatzIsAntisymmetricAndNormalised) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + t;
    const CVector u = random_vector(rng, n), v = random_vector(rng, n);
    const FermionicAnsatz a = build_fermionic_ansatz(u, v), b = build_fermionic_ansatz(v, u);
    EXPECT_NEAR(a.state.amplitudes.norm(), 1.0, 1e-14);
    EXPECT_LT((a.state.amplitudes + b.state.amplitudes).norm(), 1e-14);
    const CMatrix m = a.state.antisymmetric_matrix();
    EXPECT_LT((m + m.transpose()).norm(), 1e-15);
  }
  const CVector u = CVector::Ones(5);
  EXPECT_THROW(build_fermionic_ansatz(u, 2.0 * u), Error);
}

TEST(MultiExcitation, FidelityShortcutMatchesExplicitOverlaps) {
  std::mt19937_64 rng(2);
  const int n = 7;
  const SectorBasis basis = SectorBasis::two(n);
  CMatrix pool(n, 5);
  for (int j = 0; j < 5; ++j) pool.col(j) = random_vector(rng, n);
  const TwoExcitationState psi = TwoExcitationState::normalized(basis, random_vector(rng, basis.dimension()));
  double best = 0.0;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) {
      const FermionicAnsatz f = build_fermionic_ansatz(pool.col(a), pool.col(b));
      best = std::max(best, overlap_fidelity(f.state, psi));
    }
  const PairMatch m = max_fermionic_fidelity(psi, pool);
  EXPECT_NEAR(m.fidelity, best, 1e-13);
  EXPECT_LT(m.a, m.b);
  const FermionicAnsatz exact = build_fermionic_ansatz(pool.col(1), pool.col(3));
  const PairMatch self = max_fermionic_fidelity(exact.state, pool);
  EXPECT_NEAR(self.fidelity, 1.0, 1e-12);
  EXPECT_EQ(self.a, 1);
  EXPECT_EQ(self.b, 3);
}

TEST(MultiExcitation, PositionDistributionSumsToOne) {
  std::mt19937_64 rng(3);
  const SectorBasis basis = SectorBasis::two(9);
  const PositionDistribution pd =
      position_distribution(TwoExcitationState::normalized(basis, random_vector(rng, basis.dimension())));
  EXPECT_NEAR(pd.p.sum(), 2.0, 1e-14);  // full symmetric map
  EXPECT_LT((pd.p - pd.p.transpose()).norm(), 1e-15);
  double band = 0.0;
  for (double b : pd.band) band += b;
  EXPECT_NEAR(band, 1.0, 1e-14);
  EXPECT_EQ(pd.band[0], 0.0);
}

TEST(MultiExcitation, UniformStateBandCountsPairs) {
  const SectorBasis basis = SectorBasis::two(10);
  const PositionDistribution pd =
      position_distribution(TwoExcitationState::normalized(basis, CVector::Ones(basis.dimension())));
  for (int r = 1; r < 10; ++r) EXPECT_NEAR(pd.band[r] * basis.dimension(), 10 - r, 1e-12);
  EXPECT_EQ(pd.band_peak(), 1);
}

TEST(MultiExcitation, TailsOfImagAndFullParts) {
  const ChainConfig c = ChainConfig::waveguide(12, 0.3 * pi);
  const double k1 = 2 * pi / 12, k2 = 4 * pi / 12;
  for (MatrixPart part : {MatrixPart::Imag, MatrixPart::Full}) {
    const TailReport r = two_excitation_tails(c, k1, k2, part);
    EXPECT_LT(r.residual, 1e-10) << to_string(part);
    EXPECT_LT(r.max_coefficient_error, 1e-10) << to_string(part);
    EXPECT_TRUE(r.full_rank);
  }
  const TailReport full = two_excitation_tails(c, k1, k2, MatrixPart::Full);
  EXPECT_LT(std::abs(full.diagonal_measured - full.diagonal_predicted), 1e-10);
  EXPECT_THROW(two_excitation_tails(c, k1, k1, MatrixPart::Imag), Error);
}

TEST(MultiExcitation, TailMagnitudesScaleAsInverseLength) {
  const double k1 = 2 * pi / 12, k2 = 4 * pi / 12;
  const ChainConfig c12 = ChainConfig::waveguide(12, 0.3 * pi);
  const ChainConfig c24 = ChainConfig::waveguide(24, 0.3 * pi);
  const TailReport a = two_excitation_tails(c12, k1, k2, MatrixPart::Imag);
  const TailReport b = two_excitation_tails(c24, k1, k2, MatrixPart::Imag);
  // coefficients are N Gamma/4 times amplitudes that fall off as 1/N at fixed k
  for (std::size_t j = 0; j < a.terms.size(); ++j) {
    const double ra = std::abs(a.terms[j].measured) / 3.0, rb = std::abs(b.terms[j].measured) / 6.0;
    EXPECT_NEAR(rb / ra, 0.5, 1e-9) << a.terms[j].label;
  }
}

TEST(MultiExcitation, FaultyMatrixSpoilsTails) {
  const ChainConfig c = ChainConfig::waveguide(12, 0.3 * pi);
  CMatrix h = build_waveguide_one_excitation(c).entries;
  h(0, 1) += 1e-3;
  EXPECT_GT(two_excitation_tails(c, 2 * pi / 12, 4 * pi / 12, MatrixPart::Full, h).residual, 1e-6);
}

TEST(MultiExcitation, SubradiantPairEigenstatesAreFermionic) {
  const TwoExcitationAnalysis an = analyze_two_excitation(ChainConfig::waveguide(16, 0.5 * pi));
  ASSERT_EQ(an.two.size(), 16 * 15 / 2);
  // ground state pairs one mode of each branch here; its infidelity falls only as 1/N
  const PairMatch m = max_fermionic_fidelity(an.eigenstate(0), an.one.eigenvectors);
  EXPECT_GT(m.fidelity, 0.85);
  const FermionicAnsatz f = ansatz_from_modes(an, {Branch::Edge, 1}, {Branch::Edge, 2});
  const AnsatzMatch match = match_eigenstate(an, f.state);
  EXPECT_GT(match.fidelity, 0.9);
}

TEST(MultiExcitation, RandomBaselineIsLow) {
  const TwoExcitationAnalysis an = analyze_two_excitation(ChainConfig::waveguide(12, 0.2 * pi));
  const double base = random_state_baseline(an, 20, 42);
  EXPECT_LT(base, 0.5);
  EXPECT_EQ(base, random_state_baseline(an, 20, 42));
}

TEST(MultiExcitation, EffectiveMassAndCoupling) {
  const ChainConfig c = ChainConfig::waveguide(40, 0.4 * pi, 2.0, 0.5);
  EXPECT_NEAR(lieb_liniger_coupling(c), 0.5 * 2.0 / 8, 1e-15);
  const double g1 = analytic_decay(c, 1, Branch::Edge);
  const double m = effective_mass(c, 1, g1);
  // gamma_xi = xi^2 pi^2 / (m* L^2)
  EXPECT_NEAR(g1, pi * pi / (m * 20.0 * 20.0), 1e-14);
}
