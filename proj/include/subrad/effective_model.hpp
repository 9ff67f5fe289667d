#pragma once

// Hard-core bosons after the Holstein-Primakoff map: the quartic saturation
// term, elimination of the superradiant manifold, the on-site repulsion it
// produces and the effective Hamiltonian on the most subradiant modes.
//
// Two-boson states are stored in the orthonormal occupation basis
// {b+_m b+_n |0>, m < n} u {(b+_m)^2 |0> / sqrt(2)}. Internally a state is a
// symmetric tensor S with |psi> = 2^{-1/2} sum_mn S_mn b+_m b+_n |0>, so that
// <psi|psi> = sum |S_mn|^2.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subrad/multi_excitation.hpp"

namespace subrad {

class TwoBosonSpace {
public:
  explicit TwoBosonSpace(int n_sites) : n_(n_sites) {
    if (n_sites < 1) throw ConfigError("two-boson space needs N >= 1");
    for (int m = 0; m < n_; ++m)
      for (int q = m; q < n_; ++q) pairs_.emplace_back(m, q);
  }

  int n_sites() const { return n_; }
  int dimension() const { return static_cast<int>(pairs_.size()); }
  std::pair<int, int> sites(int i) const { return pairs_.at(static_cast<std::size_t>(i)); }

  int index(int m, int q) const {
    if (m > q) std::swap(m, q);
    if (m < 0 || q >= n_) throw Error("invalid two-boson pair");
    return m * n_ - m * (m - 1) / 2 + (q - m);
  }

  CMatrix to_tensor(const CVector& c) const {
    CMatrix s = CMatrix::Zero(n_, n_);
    for (int i = 0; i < dimension(); ++i) {
      const auto [m, q] = sites(i);
      if (m == q) {
        s(m, m) = c(i);
      } else {
        s(m, q) = c(i) / std::sqrt(2.0);
        s(q, m) = s(m, q);
      }
    }
    return s;
  }

  /// Inverse of to_tensor for a symmetric S.
  CVector from_tensor(const CMatrix& s) const {
    CVector c(dimension());
    for (int i = 0; i < dimension(); ++i) {
      const auto [m, q] = sites(i);
      c(i) = m == q ? s(m, m) : std::sqrt(2.0) * 0.5 * (s(m, q) + s(q, m));
    }
    return c;
  }

  /// b+_u b+_v |0> for one-boson mode amplitudes u, v (not normalised).
  CVector pair_state(const CVector& u, const CVector& v) const {
    CVector c(dimension());
    for (int i = 0; i < dimension(); ++i) {
      const auto [m, q] = sites(i);
      c(i) = m == q ? std::sqrt(2.0) * u(m) * v(m) : u(m) * v(q) + u(q) * v(m);
    }
    return c;
  }

  /// Matrix of a linear map given its action on basis vectors.
  template <class F>
  CMatrix matrix_of(F&& apply) const {
    const int dim = dimension();
    CMatrix out(dim, dim);
    for (int j = 0; j < dim; ++j) {
      CVector e = CVector::Zero(dim);
      e(j) = 1.0;
      out.col(j) = apply(e);
    }
    return out;
  }

private:
  int n_;
  std::vector<std::pair<int, int>> pairs_;
};

/// Dissipative one-body coupling J^I of the chain (either field model).
inline CMatrix dissipative_coupling(const ChainConfig& cfg) {
  return imag_part(build_one_excitation(cfg)).entries;
}

/// Q = -1/2 sum_mn J^I_mn b+_m b+_n b_n b_n on the two-boson space; Q is
/// nonzero only on doubly occupied sites.
inline CMatrix build_Q(const CMatrix& coupling, const TwoBosonSpace& space) {
  const int n = space.n_sites();
  if (coupling.rows() != n) throw Error("coupling does not match the two-boson space");
  CMatrix q = CMatrix::Zero(space.dimension(), space.dimension());
  for (int s = 0; s < n; ++s) {
    const int col = space.index(s, s);
    // b_s b_s |2_s> = sqrt(2) |0>; b+_m b+_s |0> is |m,s> (m != s) or sqrt(2)|2_s>
    for (int m = 0; m < n; ++m) {
      const cplx amp = -0.5 * coupling(m, s) * std::sqrt(2.0) * (m == s ? std::sqrt(2.0) : 1.0);
      q(space.index(m, s), col) += amp;
    }
  }
  return q;
}

inline CMatrix build_Q(const ChainConfig& cfg) {
  if (cfg.n_atoms < 2) throw ConfigError("two-boson space needs N >= 2");
  return build_Q(dissipative_coupling(cfg), TwoBosonSpace(cfg.n_atoms));
}

namespace detail {

struct MomentumGrid {
  int n = 0;
  double d = 1.0;
  CMatrix modes;  // column j: N^{-1/2} exp(i k_j z_m), k_j = 2 pi j/(N d)

  explicit MomentumGrid(const ChainConfig& cfg) : n(cfg.n_atoms), d(cfg.spacing), modes(n, n) {
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m)
        modes(m, j) = std::exp(I * (2.0 * pi * j * m / n)) / std::sqrt(static_cast<double>(n));
  }

  int wrap(int j) const { return ((j % n) + n) % n; }

  int index_of(double k) const {
    const double j = k * n * d / (2.0 * pi);
    if (std::abs(j - std::round(j)) > 1e-9)
      throw ConfigError("k1D is not representable on the 2 pi/(N d) momentum grid");
    return wrap(static_cast<int>(std::lround(j)));
  }

  /// M_pq such that b_p b_q |psi> = sqrt(2) M_pq |0>.
  CMatrix pair_amplitudes(const CMatrix& s) const { return modes.adjoint() * s * modes.conjugate(); }

  /// Tensor of b+_p b+_q |0>.
  CMatrix creation_tensor(int p, int q) const {
    const CVector u = modes.col(p), v = modes.col(q);
    return (u * v.transpose() + v * u.transpose()) / std::sqrt(2.0);
  }
};

} // namespace detail

/// Q = -(Gamma/8) sum_eps sum_pq b+_{eps k1D} b+_{p+q-eps k1D} b_p b_q with the
/// wavenumber sums over the chain's momentum grid (k1D must lie on it).
inline CMatrix build_Q_momentum(const ChainConfig& cfg) {
  cfg.validate();
  const detail::MomentumGrid grid(cfg);
  const int ia = grid.index_of(cfg.waveguide_model().k1d);
  const double gam = cfg.waveguide_model().gamma1d;
  const TwoBosonSpace space(cfg.n_atoms);
  const int n = cfg.n_atoms;
  return space.matrix_of([&](const CVector& c) {
    const CMatrix m = grid.pair_amplitudes(space.to_tensor(c)) * std::sqrt(2.0);
    CMatrix out = CMatrix::Zero(n, n);
    for (int eps : {+1, -1}) {
      const int e = grid.wrap(eps * ia);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (m(p, q) == cplx{}) continue;
          out += (-gam / 8.0) * m(p, q) * grid.creation_tensor(e, grid.wrap(p + q - e));
        }
    }
    return space.from_tensor(out);
  });
}

/// (Gamma/8) sum_m (b+_m)^2 b_m^2: diagonal, Gamma/4 on each |2_m>.
inline CMatrix vsub_onsite(int n_sites, double gamma) {
  const TwoBosonSpace space(n_sites);
  CMatrix v = CMatrix::Zero(space.dimension(), space.dimension());
  for (int m = 0; m < n_sites; ++m) v(space.index(m, m), space.index(m, m)) = gamma / 4.0;
  return v;
}

/// (Gamma/(8N)) sum_{p,q,k} b+_{-p+q+k} b+_p b_q b_k over the momentum grid.
inline CMatrix vsub_momentum(int n_sites, double gamma) {
  const ChainConfig cfg = ChainConfig::waveguide(n_sites, 0.5 * pi);
  const detail::MomentumGrid grid(cfg);
  const TwoBosonSpace space(n_sites);
  const int n = n_sites;
  // W_K = sum_p creation(K - p, p)
  std::vector<CMatrix> w(static_cast<std::size_t>(n), CMatrix::Zero(n, n));
  for (int kk = 0; kk < n; ++kk)
    for (int p = 0; p < n; ++p) w[static_cast<std::size_t>(kk)] += grid.creation_tensor(grid.wrap(kk - p), p);
  return space.matrix_of([&](const CVector& c) {
    const CMatrix m = grid.pair_amplitudes(space.to_tensor(c)) * std::sqrt(2.0);
    CMatrix out = CMatrix::Zero(n, n);
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k)
        if (m(q, k) != cplx{}) out += gamma / (8.0 * n) * m(q, k) * w[static_cast<std::size_t>(grid.wrap(q + k))];
    return space.from_tensor(out);
  });
}

/// Max entrywise deviation between the momentum and on-site repulsion.
inline double vsub_identity_check(int n_sites, double gamma = 1.0) {
  if (n_sites < 1 || n_sites > 12) throw ConfigError("identity check is limited to N <= 12");
  return (vsub_momentum(n_sites, gamma) - vsub_onsite(n_sites, gamma)).cwiseAbs().maxCoeff();
}

/// Projectors of the two-boson space onto 0, 1 and 2 superradiant bosons,
/// where the superradiant one-body space is spanned by |k1D>, |-k1D>.
struct TwoBosonProjectors {
  CMatrix dark, single, doubled;  // full-space projectors
  CMatrix dark_basis;             // orthonormal columns spanning the dark two-boson space
  CMatrix double_basis;
  CMatrix one_body_dark;          // N x (N-2) orthonormal
  CMatrix one_body_bright;        // N x 2 orthonormal
};

inline TwoBosonProjectors two_boson_projectors(const CMatrix& bright, const TwoBosonSpace& space) {
  const int n = space.n_sites();
  const int nb = static_cast<int>(bright.cols());
  Eigen::HouseholderQR<CMatrix> qr(bright);
  const CMatrix full = qr.householderQ() * CMatrix::Identity(n, n);
  TwoBosonProjectors out;
  out.one_body_bright = full.leftCols(nb);
  out.one_body_dark = full.rightCols(n - nb);
  const auto pair_block = [&](const CMatrix& x, const CMatrix& y, bool same) {
    std::vector<CVector> cols;
    for (int i = 0; i < x.cols(); ++i)
      for (int j = same ? i : 0; j < y.cols(); ++j) {
        CVector v = space.pair_state(x.col(i), y.col(j));
        cols.push_back(v / v.norm());
      }
    CMatrix b(space.dimension(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = cols[j];
    return b;
  };
  out.dark_basis = pair_block(out.one_body_dark, out.one_body_dark, true);
  const CMatrix single_basis = pair_block(out.one_body_bright, out.one_body_dark, false);
  out.double_basis = pair_block(out.one_body_bright, out.one_body_bright, true);
  out.dark = out.dark_basis * out.dark_basis.adjoint();
  out.single = single_basis * single_basis.adjoint();
  out.doubled = out.double_basis * out.double_basis.adjoint();
  return out;
}

inline TwoBosonProjectors two_boson_projectors(const ChainConfig& cfg) {
  const DarkSplit split = dark_superradiant_split(imag_part(build_waveguide_one_excitation(cfg)), cfg);
  return two_boson_projectors(split.superradiant_basis, TwoBosonSpace(cfg.n_atoms));
}

/// (4/(N Gamma)) P_D Q^dagger P_S Q P_D; optionally P_S also covers the
/// doubly-superradiant states.
inline CMatrix eliminate_superradiant(const ChainConfig& cfg, bool include_double = false) {
  const TwoBosonProjectors pr = two_boson_projectors(cfg);
  const CMatrix q = build_Q(cfg);
  const CMatrix ps = include_double ? CMatrix(pr.single + pr.doubled) : pr.single;
  const double scale = 4.0 / (cfg.n_atoms * cfg.waveguide_model().gamma1d);
  return scale * pr.dark * q.adjoint() * ps * q * pr.dark;
}

struct EliminationCheck {
  double complement_deviation = 0.0;  // dark space minus the Q-reachable doubly-superradiant sector
  double cross_deviation = 0.0;
  double reachable_deviation = 0.0;   // inside that sector
  int dark_dimension = 0;
  int reachable_dimension = 0;
};

/// Compare the elimination operator with the on-site repulsion on the dark
/// space. The reachable sector is the row space of P_2 Q P_D: dark pairs that
/// Q scatters into two superradiant bosons.
inline EliminationCheck vsub_elimination_check(const ChainConfig& cfg) {
  const TwoBosonProjectors pr = two_boson_projectors(cfg);
  const CMatrix q = build_Q(cfg);
  const double gam = cfg.waveguide_model().gamma1d;
  const CMatrix elim = 4.0 / (cfg.n_atoms * gam) * pr.dark * q.adjoint() * pr.single * q * pr.dark;
  const CMatrix diff = elim - pr.dark * vsub_onsite(cfg.n_atoms, gam) * pr.dark;

  const CMatrix reach_map = pr.double_basis.adjoint() * q * pr.dark_basis;  // 3 x D
  Eigen::JacobiSVD<CMatrix> svd(reach_map, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-10 * std::max(smax, 1e-300)) ++rank;
  const CMatrix v = svd.matrixV();
  const CMatrix reach = pr.dark_basis * v.leftCols(rank);
  const CMatrix comp = pr.dark_basis * v.rightCols(v.cols() - rank);

  EliminationCheck out;
  out.dark_dimension = static_cast<int>(pr.dark_basis.cols());
  out.reachable_dimension = rank;
  const auto maxabs = [](const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; };
  out.complement_deviation = maxabs(comp.adjoint() * diff * comp);
  out.cross_deviation = maxabs(comp.adjoint() * diff * reach);
  out.reachable_deviation = maxabs(reach.adjoint() * diff * reach);
  return out;
}

enum class GammaSource { Numeric, Analytic };

struct EffectiveHamiltonian {
  Branch branch = Branch::Edge;
  int xi_max = 0;
  std::vector<double> gammas;              // gamma_xi, xi = 1..xi_max
  std::vector<std::pair<int, int>> pairs;  // (xi1, xi2), 1-based, xi1 <= xi2
  CMatrix modes;                           // N x xi_max, orthonormal
  double max_mode_overlap = 0.0;           // before orthonormalisation
  CMatrix pair_basis;                      // two-boson coordinates of the pair states
  CMatrix matrix;                          // Hermitian, pair basis
  std::vector<double> decay_rates;         // 2 x eigenvalues, ascending
  CMatrix eigenvectors;
  double mass = 0.0;                       // m* from xi = 1
  double coupling = 0.0;                   // c_LL
  double length = 0.0;                     // L = N d
};

/// H = 1/2 sum gamma_xi b+_xi b_xi + V_sub on the two-boson states of the
/// xi_max most subradiant modes of one branch; V_sub in its on-site form.
inline EffectiveHamiltonian build_effective_H(const ChainConfig& cfg, int xi_max,
                                              Branch branch = Branch::Edge,
                                              GammaSource source = GammaSource::Numeric) {
  cfg.validate();
  if (xi_max < 2) throw ConfigError("effective Hamiltonian needs xi_max >= 2");
  if (4 * xi_max > cfg.n_atoms) throw ConfigError("xi_max exceeds N/4");
  const SpectralResult one = eigendecompose(build_waveguide_one_excitation(cfg));
  const auto labels = classify_modes(one, cfg);
  const int n = cfg.n_atoms;

  EffectiveHamiltonian eh;
  eh.branch = branch;
  eh.xi_max = xi_max;
  CMatrix phi(n, xi_max);
  for (int xi = 1; xi <= xi_max; ++xi) {
    const auto mode = find_mode(labels, branch, xi);
    if (!mode) throw Error("branch has fewer than xi_max subradiant modes");
    phi.col(xi - 1) = one.vector(*mode);
    eh.gammas.push_back(source == GammaSource::Numeric
                            ? one.decay_rates[static_cast<std::size_t>(*mode)]
                            : analytic_decay(cfg, xi, branch));
  }
  const CMatrix gram = phi.adjoint() * phi;
  for (int i = 0; i < xi_max; ++i)
    for (int j = i + 1; j < xi_max; ++j) eh.max_mode_overlap = std::max(eh.max_mode_overlap, std::abs(gram(i, j)));
  // Gram-Schmidt with the phase of each mode kept
  Eigen::HouseholderQR<CMatrix> qr(phi);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, xi_max);
  const CMatrix r = qr.matrixQR().topRows(xi_max).triangularView<Eigen::Upper>();
  for (int j = 0; j < xi_max; ++j) {
    const cplx rjj = r(j, j);
    if (std::abs(rjj) > 0.0) q.col(j) *= rjj / std::abs(rjj);
  }
  eh.modes = q;

  const TwoBosonSpace space(n);
  std::vector<double> kinetic;
  std::vector<CVector> cols;
  for (int i = 0; i < xi_max; ++i)
    for (int j = i; j < xi_max; ++j) {
      CVector v = space.pair_state(q.col(i), q.col(j));
      cols.push_back(v / v.norm());
      eh.pairs.emplace_back(i + 1, j + 1);
      kinetic.push_back(0.5 * (eh.gammas[static_cast<std::size_t>(i)] + eh.gammas[static_cast<std::size_t>(j)]));
    }
  eh.pair_basis.resize(space.dimension(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) eh.pair_basis.col(static_cast<Eigen::Index>(j)) = cols[j];

  // on-site V is diagonal with Gamma/4 on |2_m>
  const double gam = cfg.waveguide_model().gamma1d;
  CVector vdiag = CVector::Zero(space.dimension());
  for (int m = 0; m < n; ++m) vdiag(space.index(m, m)) = gam / 4.0;
  eh.matrix = eh.pair_basis.adjoint() * vdiag.asDiagonal() * eh.pair_basis;
  for (std::size_t j = 0; j < kinetic.size(); ++j)
    eh.matrix(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) += kinetic[j];
  eh.matrix = 0.5 * (eh.matrix + eh.matrix.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> es(eh.matrix);
  if (es.info() != Eigen::Success) throw ConvergenceError("effective Hamiltonian diagonalisation failed", 0, 0.0);
  for (int j = 0; j < es.eigenvalues().size(); ++j) eh.decay_rates.push_back(2.0 * es.eigenvalues()(j));
  eh.eigenvectors = es.eigenvectors();
  eh.mass = effective_mass(cfg, 1, eh.gammas.front());
  eh.coupling = lieb_liniger_coupling(cfg);
  eh.length = cfg.n_atoms * cfg.spacing;
  return eh;
}

/// Free-fermion prediction: sorted gamma_xi1 + gamma_xi2, xi1 < xi2.
inline std::vector<double> tonks_girardeau_spectrum(const std::vector<double>& gammas) {
  std::vector<double> out;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    for (std::size_t j = i + 1; j < gammas.size(); ++j) out.push_back(gammas[i] + gammas[j]);
  std::sort(out.begin(), out.end());
  return out;
}

/// Fidelity of the lowest eigenstate of the effective Hamiltonian with the
/// fermionised state sum_{m<n} (u_m v_n - u_n v_m) b+_m b+_n |0> of modes 1, 2.
inline double fermionized_overlap(const EffectiveHamiltonian& eh) {
  const int n = static_cast<int>(eh.modes.rows());
  const TwoBosonSpace space(n);
  CVector f = CVector::Zero(space.dimension());
  for (int i = 0; i < space.dimension(); ++i) {
    const auto [m, q] = space.sites(i);
    if (m != q) f(i) = eh.modes(m, 0) * eh.modes(q, 1) - eh.modes(q, 0) * eh.modes(m, 1);
  }
  f.normalize();
  const CVector lowest = eh.pair_basis * eh.eigenvectors.col(0);
  return std::norm(f.dot(lowest));
}

/// Largest relative deviation of the count lowest effective-model decay rates
/// from the free-fermion sums.
inline double tonks_girardeau_deviation(const EffectiveHamiltonian& eh, int count) {
  const auto tg = tonks_girardeau_spectrum(eh.gammas);
  const int c = std::min<int>(count, static_cast<int>(tg.size()));
  double dev = 0.0;
  for (int j = 0; j < c; ++j)
    dev = std::max(dev, std::abs(eh.decay_rates[static_cast<std::size_t>(j)] - tg[static_cast<std::size_t>(j)]) /
                            tg[static_cast<std::size_t>(j)]);
  return dev;
}

struct DarkInteraction {
  int n_atoms = 0;
  int short_lived = 0;
  int dark_dimension = 0;   // one-body
  double mean_diagonal = 0.0;
  double onsite_coefficient = 0.0;  // least-squares c in V ~ c P_D sum (b+)^2 b^2 P_D
};

/// Elimination of short-lived one-body modes (H^I eigenvalue > rate/4) with one
/// energy denominator per mode: V = sum_j (lambda_j/4) P_D A_j^dagger P_D A_j P_D,
/// A_j = sum_n u_j(n)^* b+_n b_n b_n. Reduces to the waveguide formula when
/// H^I has rank two.
inline DarkInteraction dark_interaction(const CMatrix& hi, double rate) {
  const int n = static_cast<int>(hi.rows());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (hi + hi.adjoint()));
  std::vector<int> bright, dark;
  for (int j = 0; j < n; ++j) (es.eigenvalues()(j) > rate / 4.0 ? bright : dark).push_back(j);
  DarkInteraction out;
  out.n_atoms = n;
  out.short_lived = static_cast<int>(bright.size());
  out.dark_dimension = static_cast<int>(dark.size());
  if (dark.empty() || bright.empty()) return out;
  CMatrix dk(n, static_cast<Eigen::Index>(dark.size()));
  for (std::size_t i = 0; i < dark.size(); ++i) dk.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(dark[i]);

  // dark product pairs (a <= b), amplitude vectors 2/eta * (a o b)
  const int nd = static_cast<int>(dark.size());
  std::vector<CVector> prods;
  for (int i = 0; i < nd; ++i)
    for (int j = i; j < nd; ++j) {
      const double eta = i == j ? std::sqrt(2.0) : 1.0;
      prods.push_back((2.0 / eta) * dk.col(i).cwiseProduct(dk.col(j)));
    }
  const int np = static_cast<int>(prods.size());
  CMatrix ab(n, np);
  for (int p = 0; p < np; ++p) ab.col(p) = prods[static_cast<std::size_t>(p)];
  CMatrix w = CMatrix::Zero(np, np);
  for (int j : bright) {
    const CVector u = es.eigenvectors().col(j);
    // A_j|ab> = conj(u) o (2/eta)(a o b); keep its dark-space part
    const CMatrix aj = dk.adjoint() * (u.conjugate().asDiagonal() * ab);
    w += (es.eigenvalues()(j) / 4.0) * aj.adjoint() * aj;
  }
  const CMatrix site = ab.adjoint() * ab;  // <a'b'| sum (b+)^2 b^2 |ab>
  out.mean_diagonal = w.diagonal().real().mean();
  out.onsite_coefficient = (site.adjoint() * w).trace().real() / site.squaredNorm();
  return out;
}

struct Vsub3DReport {
  bool subradiant_regime = false;
  std::string note;
  std::vector<DarkInteraction> points;
  ScalingFit fit;  // mean_diagonal against N
};

inline Vsub3DReport universality_vsub_3d(const ChainConfig& cfg3d, const std::vector<int>& sizes) {
  const auto& fs = cfg3d.free_space_model();
  Vsub3DReport rep;
  if (!cfg3d.subradiant_regime()) {
    rep.note = "no short-lived/dark split (k0 d >= pi)";
    return rep;
  }
  rep.subradiant_regime = true;
  std::vector<std::pair<double, double>> s;
  for (int n : sizes) {
    const ChainConfig cfg = cfg3d.with_atoms(n);
    DarkInteraction di = dark_interaction(imag_part(build_freespace_one_excitation(cfg)).entries, fs.gamma0);
    if (di.short_lived == 0) {
      rep.subradiant_regime = false;
      rep.note = "no short-lived family found";
      return rep;
    }
    s.emplace_back(n, di.mean_diagonal);
    rep.points.push_back(di);
  }
  rep.fit = power_law_fit(s);
  return rep;
}

} // namespace subrad
