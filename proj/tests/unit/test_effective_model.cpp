#include <gtest/gtest.h>

#include <random>

#include "subrad/effective_model.hpp"

using namespace subrad;

namespace {

// Bosonic Fock space with at most two quanta per site; operators as dense matrices.
struct Fock {
  int n, dim;
  std::vector<std::vector<int>> occ;
  std::vector<RMatrix> b;

  explicit Fock(int sites) : n(sites), dim(1) {
    for (int i = 0; i < n; ++i) dim *= 3;
    for (int s = 0; s < dim; ++s) {
      std::vector<int> o(n);
      for (int i = 0, t = s; i < n; ++i, t /= 3) o[i] = t % 3;
      occ.push_back(o);
    }
    for (int m = 0; m < n; ++m) {
      RMatrix op = RMatrix::Zero(dim, dim);
      for (int s = 0; s < dim; ++s)
        if (occ[s][m] > 0) op(find(lowered(occ[s], m)), s) = std::sqrt(double(occ[s][m]));
      b.push_back(op);
    }
  }

  static std::vector<int> lowered(std::vector<int> o, int m) {
    --o[m];
    return o;
  }

  int find(const std::vector<int>& o) const {
    int s = 0;
    for (int i = n - 1; i >= 0; --i) s = 3 * s + o[i];
    return s;
  }

  // Fock index of each two-boson basis state, in TwoBosonSpace order.
  std::vector<int> two_boson_states(const TwoBosonSpace& space) const {
    std::vector<int> out;
    for (int i = 0; i < space.dimension(); ++i) {
      std::vector<int> o(n, 0);
      const auto [m, q] = space.sites(i);
      ++o[m];
      ++o[q];
      out.push_back(find(o));
    }
    return out;
  }

  CMatrix restrict(const CMatrix& op, const TwoBosonSpace& space) const {
    const auto idx = two_boson_states(space);
    CMatrix out(space.dimension(), space.dimension());
    for (int r = 0; r < space.dimension(); ++r)
      for (int c = 0; c < space.dimension(); ++c) out(r, c) = op(idx[r], idx[c]);
    return out;
  }
};

} // namespace

TEST(EffectiveModel, TensorRoundTrip) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const TwoBosonSpace space(6);
  CVector c(space.dimension());
  for (int i = 0; i < c.size(); ++i) c(i) = cplx(g(rng), g(rng));
  const CMatrix s = space.to_tensor(c);
  EXPECT_NEAR(s.squaredNorm(), c.squaredNorm(), 1e-12);
  EXPECT_LT((space.from_tensor(s) - c).norm(), 1e-14);
  for (int i = 0; i < space.dimension(); ++i) {
    const auto [m, q] = space.sites(i);
    EXPECT_EQ(space.index(m, q), i);
    EXPECT_EQ(space.index(q, m), i);
  }
}

TEST(EffectiveModel, QuarticTermMatchesFockAlgebra) {
  for (int n : {3, 4, 5}) {
    const ChainConfig c = ChainConfig::waveguide(n, 0.37 * pi);
    const CMatrix ji = dissipative_coupling(c);
    const Fock f(n);
    CMatrix q = CMatrix::Zero(f.dim, f.dim);
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        const RMatrix op = f.b[m].transpose() * f.b[k].transpose() * f.b[k] * f.b[k];
        q += -0.5 * ji(m, k) * op.cast<cplx>();
      }
    const TwoBosonSpace space(n);
    EXPECT_LT((build_Q(ji, space) - f.restrict(q, space)).cwiseAbs().maxCoeff(), 1e-15) << "N = " << n;
  }
}

TEST(EffectiveModel, OnsiteRepulsionMatchesFockAlgebra) {
  const int n = 4;
  const Fock f(n);
  RMatrix v = RMatrix::Zero(f.dim, f.dim);
  for (int m = 0; m < n; ++m) v += 1.3 / 8.0 * f.b[m].transpose() * f.b[m].transpose() * f.b[m] * f.b[m];
  const TwoBosonSpace space(n);
  EXPECT_LT((vsub_onsite(n, 1.3) - f.restrict(v.cast<cplx>(), space)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EffectiveModel, MomentumFormsAgreeOnGrid) {
  for (int n : {6, 8, 12}) {
    const ChainConfig c = ChainConfig::waveguide(n, 2 * pi * 2 / n);
    EXPECT_LT((build_Q_momentum(c) - build_Q(c)).cwiseAbs().maxCoeff(), 1e-13) << "N = " << n;
    EXPECT_LT(vsub_identity_check(n, 0.7), 1e-13);
  }
  EXPECT_THROW(build_Q_momentum(ChainConfig::waveguide(8, 0.3)), Error);
  EXPECT_THROW(vsub_identity_check(13), ConfigError);
}

TEST(EffectiveModel, ProjectorsResolveIdentity) {
  const TwoBosonProjectors p = two_boson_projectors(ChainConfig::waveguide(9, 0.28 * pi));
  const int dim = TwoBosonSpace(9).dimension();
  EXPECT_LT((p.dark + p.single + p.doubled - CMatrix::Identity(dim, dim)).norm(), 1e-12);
  EXPECT_LT((p.dark * p.single).norm(), 1e-12);
  EXPECT_EQ(p.dark_basis.cols(), 7 * 8 / 2);
  EXPECT_EQ(p.double_basis.cols(), 3);
}

TEST(EffectiveModel, EliminationGivesOnsiteRepulsionOnDarkSpace) {
  for (int n : {8, 10}) {
    const EliminationCheck e = vsub_elimination_check(ChainConfig::waveguide(n, 0.5 * pi));
    EXPECT_LT(e.complement_deviation, 1e-12);
    EXPECT_LT(e.cross_deviation, 1e-12);
    EXPECT_EQ(e.dark_dimension, (n - 2) * (n - 1) / 2);
    EXPECT_GE(e.reachable_dimension, 1);
    EXPECT_LT(e.reachable_dimension, 4);
  }
}

TEST(EffectiveModel, GeneralisedEliminationReducesToWaveguideForm) {
  // commensurate spacing: both superradiant eigenvalues equal N Gamma/4
  const ChainConfig c = ChainConfig::waveguide(8, 0.5 * pi);
  const DarkInteraction di = dark_interaction(dissipative_coupling(c), 1.0);
  EXPECT_EQ(di.short_lived, 2);
  const int pairs = di.dark_dimension * (di.dark_dimension + 1) / 2;
  const cplx trace = eliminate_superradiant(c).trace();
  EXPECT_NEAR(di.mean_diagonal * pairs, trace.real(), 1e-12);
}

TEST(EffectiveModel, EffectiveHamiltonianStructure) {
  const ChainConfig c = ChainConfig::waveguide(32, 0.5 * pi);
  const EffectiveHamiltonian eh = build_effective_H(c, 8);
  EXPECT_EQ(static_cast<int>(eh.pairs.size()), 8 * 9 / 2);
  EXPECT_LT((eh.matrix - eh.matrix.adjoint()).norm(), 1e-15);
  EXPECT_LT((eh.modes.adjoint() * eh.modes - CMatrix::Identity(8, 8)).norm(), 1e-13);
  EXPECT_LT((eh.pair_basis.adjoint() * eh.pair_basis - CMatrix::Identity(36, 36)).norm(), 1e-12);
  for (std::size_t j = 1; j < eh.decay_rates.size(); ++j) EXPECT_LE(eh.decay_rates[j - 1], eh.decay_rates[j]);
  EXPECT_GT(eh.decay_rates.front(), 2 * eh.gammas.front() - 1e-15);  // repulsion only raises
  EXPECT_NEAR(eh.mass * eh.coupling, pi * pi / (32.0 * 32.0 * eh.gammas[0]) / 8.0, 1e-12);
  EXPECT_GT(fermionized_overlap(eh), 0.8);
  EXPECT_THROW(build_effective_H(c, 9), ConfigError);
  EXPECT_THROW(build_effective_H(c, 1), ConfigError);
}

TEST(EffectiveModel, TonksGirardeauLimitImprovesWithSize) {
  double prev = 1.0;
  for (int n : {24, 48}) {
    const EffectiveHamiltonian eh = build_effective_H(ChainConfig::waveguide(n, 0.5 * pi), n / 4);
    const double dev = tonks_girardeau_deviation(eh, 3);
    EXPECT_LT(dev, prev);
    prev = dev;
  }
  EXPECT_LT(prev, 0.1);
  const auto tg = tonks_girardeau_spectrum({1.0, 4.0, 9.0});
  ASSERT_EQ(tg.size(), 3u);
  EXPECT_EQ(tg[0], 5.0);
  EXPECT_EQ(tg[2], 13.0);
}
