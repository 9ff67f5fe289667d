#pragma once

// Two-excitation sector: antisymmetrised products of one-excitation modes,
// fidelity searches against exact eigenstates, pair-separation statistics and
// the tail algebra of two-excitation Bloch states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "subrad/asymptotics.hpp"

namespace subrad {

struct TwoExcitationState {
  SectorBasis basis;
  CVector amplitudes;

  static TwoExcitationState normalized(SectorBasis basis, CVector c) {
    if (basis.sector() != Sector::TwoExcitation || c.size() != basis.dimension())
      throw Error("amplitudes do not match the two-excitation basis");
    const double nrm = c.norm();
    if (!(nrm > 0.0)) throw Error("zero two-excitation state");
    return {std::move(basis), c / nrm};
  }

  int n_sites() const { return basis.n_sites(); }

  /// Antisymmetric N x N amplitude matrix, A(m,n) = c_mn for m < n.
  CMatrix antisymmetric_matrix() const {
    const int n = n_sites();
    CMatrix a = CMatrix::Zero(n, n);
    for (int i = 0; i < basis.dimension(); ++i) {
      const auto [m, q] = basis.sites(i);
      a(m, q) = amplitudes(i);
      a(q, m) = -amplitudes(i);
    }
    return a;
  }
};

struct FermionicAnsatz {
  CVector phi1, phi2;
  TwoExcitationState state;
  double predicted_gamma = 0.0;
};

inline CVector antisymmetric_product(const CVector& u, const CVector& v, const SectorBasis& basis) {
  CVector c(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [m, n] = basis.sites(i);
    c(i) = u(m) * v(n) - v(m) * u(n);
  }
  return c;
}

/// c_mn proportional to phi1(m) phi2(n) - phi2(m) phi1(n), normalised.
inline FermionicAnsatz build_fermionic_ansatz(const CVector& phi1, const CVector& phi2,
                                              double gamma1 = 0.0, double gamma2 = 0.0) {
  if (phi1.size() != phi2.size() || phi1.size() < 2)
    throw Error("fermionic ansatz needs two vectors on the same chain (N >= 2)");
  const SectorBasis basis = SectorBasis::two(static_cast<int>(phi1.size()));
  CVector c = antisymmetric_product(phi1, phi2, basis);
  if (c.norm() <= 1e-12 * phi1.norm() * phi2.norm())
    throw Error("parallel constituents give a zero fermionic state");
  FermionicAnsatz out{phi1, phi2, TwoExcitationState::normalized(basis, std::move(c)),
                      gamma1 + gamma2};
  return out;
}

inline double overlap_fidelity(const TwoExcitationState& a, const TwoExcitationState& b) {
  return std::norm(a.amplitudes.dot(b.amplitudes));
}

struct PairMatch {
  double fidelity = 0.0;
  int a = -1, b = -1;  // pool columns, a < b
};

/// Best |<F_ab|psi>|^2 over unordered pool pairs; exhaustive.
/// Uses <F_ab|psi> = (Phi^H A conj(Phi))_ab / sqrt(G_aa G_bb - |G_ab|^2), with A the
/// antisymmetric amplitude matrix and G the Gram matrix of the pool.
inline PairMatch max_fermionic_fidelity(const TwoExcitationState& psi, const CMatrix& pool) {
  if (pool.cols() < 2) throw Error("fidelity pool needs at least two modes");
  if (pool.rows() != psi.n_sites()) throw Error("pool does not match the chain size");
  const CMatrix a = psi.antisymmetric_matrix();
  const CMatrix num = pool.adjoint() * a * pool.conjugate();
  const CMatrix gram = pool.adjoint() * pool;
  PairMatch best;
  const int m = static_cast<int>(pool.cols());
  for (int x = 0; x < m; ++x)
    for (int y = x + 1; y < m; ++y) {
      const double norm2 = gram(x, x).real() * gram(y, y).real() - std::norm(gram(x, y));
      if (norm2 <= 1e-24 * gram(x, x).real() * gram(y, y).real()) continue;
      const double f = std::norm(num(x, y)) / norm2;
      if (f > best.fidelity) best = {f, x, y};
    }
  best.fidelity = std::min(best.fidelity, 1.0);
  return best;
}

struct PositionDistribution {
  RMatrix p;                    // symmetric, zero diagonal
  std::vector<double> band;     // band[r] = sum_{n-m=r} P(m,n), r = 0..N-1
  int band_peak() const {
    return static_cast<int>(std::max_element(band.begin(), band.end()) - band.begin());
  }
};

inline PositionDistribution position_distribution(const TwoExcitationState& s) {
  const int n = s.n_sites();
  PositionDistribution out{RMatrix::Zero(n, n), std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  for (int i = 0; i < s.basis.dimension(); ++i) {
    const auto [m, q] = s.basis.sites(i);
    const double w = std::norm(s.amplitudes(i));
    out.p(m, q) = w;
    out.p(q, m) = w;
    out.band[static_cast<std::size_t>(q - m)] += w;
  }
  return out;
}

/// One- and two-excitation spectra of a chain, computed once and shared.
struct TwoExcitationAnalysis {
  ChainConfig cfg;
  SpectralResult one;
  std::vector<ModeLabel> labels;
  SpectralResult two;
  SectorBasis basis;

  TwoExcitationState eigenstate(int j) const {
    return TwoExcitationState::normalized(basis, two.vector(j));
  }

  int mode(Branch b, int xi) const {
    const auto m = find_mode(labels, b, xi);
    if (!m)
      throw Error(std::string("no subradiant ") + to_string(b) + " mode with xi = " +
                  std::to_string(xi));
    return *m;
  }
};

inline TwoExcitationAnalysis analyze_two_excitation(const ChainConfig& cfg) {
  TwoExcitationAnalysis out;
  out.cfg = cfg;
  out.one = eigendecompose(build_one_excitation(cfg));
  out.labels = classify_modes(out.one, cfg);
  const SectorMatrix h2 = build_two_excitation(cfg);
  out.basis = h2.basis;
  out.two = eigendecompose(h2);
  return out;
}

struct AnsatzMatch {
  int state = -1;          // best-matching two-excitation eigenstate
  double fidelity = 0.0;
  double runner_up = 0.0;
  bool ambiguous = false;  // runner-up within 0.01 of the best
};

inline AnsatzMatch match_eigenstate(const TwoExcitationAnalysis& an, const TwoExcitationState& f) {
  const CVector ov = an.two.eigenvectors.adjoint() * f.amplitudes;
  AnsatzMatch m;
  for (int j = 0; j < ov.size(); ++j) {
    const double v = std::norm(ov(j));
    if (v > m.fidelity) {
      m.runner_up = m.fidelity;
      m.fidelity = v;
      m.state = j;
    } else if (v > m.runner_up) {
      m.runner_up = v;
    }
  }
  m.fidelity = std::min(m.fidelity, 1.0);
  m.ambiguous = m.fidelity - m.runner_up < 0.01;
  return m;
}

struct ModeRef {
  Branch branch = Branch::Edge;
  int xi = 1;
};

inline FermionicAnsatz ansatz_from_modes(const TwoExcitationAnalysis& an, ModeRef p, ModeRef q) {
  const int i = an.mode(p.branch, p.xi), j = an.mode(q.branch, q.xi);
  return build_fermionic_ansatz(an.one.vector(i), an.one.vector(j),
                                an.one.decay_rates[static_cast<std::size_t>(i)],
                                an.one.decay_rates[static_cast<std::size_t>(j)]);
}

struct Fig2Row {
  int state = 0;  // 0-based rank by decay rate
  double gamma = 0.0;
  double omega = 0.0;
  PairMatch best;
};

struct Fig2Report {
  std::vector<Fig2Row> rows;
  std::vector<int> dips;  // indices among the first `window` rows
  int window = 10;
};

/// Max fermionic fidelity of the most subradiant two-excitation eigenstates,
/// pool = all one-excitation eigenvectors. A dip is a state among the first
/// `window` whose fidelity is below half the median of that window.
inline Fig2Report fig2_analysis(const TwoExcitationAnalysis& an, int n_states, int window = 10) {
  Fig2Report rep;
  rep.window = window;
  const int count = std::min(n_states, an.two.size());
  for (int s = 0; s < count; ++s) {
    Fig2Row row;
    row.state = s;
    row.gamma = an.two.decay_rates[static_cast<std::size_t>(s)];
    row.omega = an.two.shifts[static_cast<std::size_t>(s)];
    row.best = max_fermionic_fidelity(an.eigenstate(s), an.one.eigenvectors);
    rep.rows.push_back(row);
  }
  const int w = std::min<int>(window, static_cast<int>(rep.rows.size()));
  if (w > 0) {
    std::vector<double> f;
    for (int s = 0; s < w; ++s) f.push_back(rep.rows[static_cast<std::size_t>(s)].best.fidelity);
    std::vector<double> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    const double median = w % 2 ? sorted[static_cast<std::size_t>(w / 2)]
                                : 0.5 * (sorted[static_cast<std::size_t>(w / 2 - 1)] +
                                         sorted[static_cast<std::size_t>(w / 2)]);
    for (int s = 0; s < w; ++s)
      if (f[static_cast<std::size_t>(s)] < 0.5 * median) rep.dips.push_back(s);
  }
  return rep;
}

/// Mean max fermionic fidelity of Haar-random two-excitation states.
inline double random_state_baseline(const TwoExcitationAnalysis& an, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    CVector c(an.basis.dimension());
    for (int i = 0; i < c.size(); ++i) c(i) = cplx(gauss(rng), gauss(rng));
    total += max_fermionic_fidelity(TwoExcitationState::normalized(an.basis, c), an.one.eigenvectors)
                 .fidelity;
  }
  return total / samples;
}

/// Effective mass m* = xi^2 pi^2 / (N^2 d^2 gamma_xi).
inline double effective_mass(const ChainConfig& cfg, int xi, double gamma_xi) {
  if (!(gamma_xi > 0.0)) throw Error("effective mass needs gamma > 0");
  const double nd = cfg.n_atoms * cfg.spacing;
  return xi * xi * pi * pi / (nd * nd * gamma_xi);
}

/// Lieb-Liniger coupling c_LL = d Gamma / 8.
inline double lieb_liniger_coupling(const ChainConfig& cfg) { return cfg.spacing * cfg.rate() / 8.0; }

enum class BranchPair { Same, Mixed };

inline const char* to_string(BranchPair p) { return p == BranchPair::Same ? "same" : "mixed"; }

inline std::pair<ModeRef, ModeRef> branch_pair_modes(BranchPair p) {
  return p == BranchPair::Same ? std::pair{ModeRef{Branch::Edge, 1}, ModeRef{Branch::Edge, 2}}
                               : std::pair{ModeRef{Branch::Edge, 1}, ModeRef{Branch::Center, 1}};
}

struct InfidelityPoint {
  int n_atoms = 0;
  AnsatzMatch match;
  double infidelity = 0.0;
  double phase_deviation = 0.0;  // |Re(k1 - k2)| / (m* c_LL)
  double gamma_matched = 0.0;
  double gamma_sum = 0.0;
};

struct InfidelityScaling {
  BranchPair pair = BranchPair::Same;
  std::vector<InfidelityPoint> points;
  ScalingFit fit;
  ScalingFit phase_fit;
  bool any_ambiguous = false;
};

inline InfidelityPoint infidelity_point(const TwoExcitationAnalysis& an, BranchPair pair) {
  const auto [p, q] = branch_pair_modes(pair);
  const FermionicAnsatz f = ansatz_from_modes(an, p, q);
  InfidelityPoint pt;
  pt.n_atoms = an.cfg.n_atoms;
  pt.match = match_eigenstate(an, f.state);
  pt.infidelity = std::max(1.0 - pt.match.fidelity, 0.0);
  pt.gamma_matched = an.two.decay_rates[static_cast<std::size_t>(pt.match.state)];
  pt.gamma_sum = f.predicted_gamma;
  const ComplexWavenumber k1 = solve_complex_k(an.cfg, p.xi, p.branch);
  const ComplexWavenumber k2 = solve_complex_k(an.cfg, q.xi, q.branch);
  const double mass = effective_mass(an.cfg, p.xi, analytic_decay(an.cfg, p.xi, p.branch));
  pt.phase_deviation = std::abs((k1.k - k2.k).real()) / (mass * lieb_liniger_coupling(an.cfg));
  return pt;
}

inline InfidelityScaling infidelity_scaling(const std::vector<TwoExcitationAnalysis>& sweep,
                                            BranchPair pair) {
  InfidelityScaling out;
  out.pair = pair;
  std::vector<std::pair<double, double>> s, ph;
  for (const auto& an : sweep) {
    InfidelityPoint pt = infidelity_point(an, pair);
    out.any_ambiguous = out.any_ambiguous || pt.match.ambiguous;
    s.emplace_back(pt.n_atoms, pt.infidelity);
    ph.emplace_back(pt.n_atoms, pt.phase_deviation);
    out.points.push_back(pt);
  }
  out.fit = fit_scaling(s);
  out.phase_fit = fit_scaling(ph);
  return out;
}

struct AdditivityRow {
  ModeRef first, second;
  AnsatzMatch match;
  double gamma_numeric = 0.0;
  double gamma_sum = 0.0;
  double relative_deviation = 0.0;
};

inline std::vector<AdditivityRow> decay_additivity_check(const TwoExcitationAnalysis& an,
                                                         const std::vector<std::pair<ModeRef, ModeRef>>& pairs) {
  std::vector<AdditivityRow> rows;
  for (const auto& [p, q] : pairs) {
    const FermionicAnsatz f = ansatz_from_modes(an, p, q);
    AdditivityRow r;
    r.first = p;
    r.second = q;
    r.match = match_eigenstate(an, f.state);
    r.gamma_numeric = an.two.decay_rates[static_cast<std::size_t>(r.match.state)];
    r.gamma_sum = f.predicted_gamma;
    r.relative_deviation = std::abs(r.gamma_numeric - r.gamma_sum) / r.gamma_sum;
    rows.push_back(r);
  }
  return rows;
}

// ---- tails of two-excitation Bloch states ------------------------------------

/// True when k N d / (2 pi) is an integer.
inline bool on_grid(const ChainConfig& cfg, double k) {
  const double j = k * cfg.n_atoms * cfg.spacing / (2.0 * pi);
  return std::abs(j - std::round(j)) < 1e-9;
}

/// |k,k'> = sum_{m<n} exp(i k z_m + i k' z_n) |e_m,e_n>, unnormalised.
inline CVector pair_bloch_state(const ChainConfig& cfg, const SectorBasis& basis, cplx k, cplx kp) {
  CVector v(basis.dimension());
  for (int i = 0; i < basis.dimension(); ++i) {
    const auto [m, n] = basis.sites(i);
    v(i) = std::exp(I * (k * cfg.position(m) + kp * cfg.position(n)));
  }
  return v;
}

/// |b_{k,k'}> = |k,k'> + |k',k>.
inline CVector symmetrized_pair_state(const ChainConfig& cfg, const SectorBasis& basis, cplx k, cplx kp) {
  return pair_bloch_state(cfg, basis, k, kp) + pair_bloch_state(cfg, basis, kp, k);
}

/// Tail amplitudes of a two-excitation Bloch state with z_1 = 0.
struct PairTailAmplitudes {
  ChainConfig cfg;
  double k1 = 0.0, k2 = 0.0;

  double x(double k, int eps) const { return (k - eps * cfg.waveguide_model().k1d) * cfg.spacing; }

  cplx g(double k, int eps) const {
    const double xe = x(k, eps);
    const double n = cfg.n_atoms;
    return std::exp(I * xe * (cfg.position(0) - cfg.spacing) / cfg.spacing) / n /
           (std::exp(-I * xe) - 1.0);
  }

  cplx h(double k, int eps) const {
    const double xe = x(k, eps);
    const double n = cfg.n_atoms;
    const double zn = cfg.position(cfg.n_atoms - 1);
    return std::exp(I * (k - eps * cfg.waveguide_model().k1d) * zn) / n / (std::exp(-I * xe) - 1.0);
  }

  cplx c(int eps) const {
    const double n = cfg.n_atoms;
    return (1.0 / (std::exp(I * x(k1, eps)) - 1.0) + 1.0 / (std::exp(-I * x(k2, eps)) - 1.0)) / n;
  }
};

struct TailTerm {
  std::string label;
  cplx predicted{};
  cplx measured{};
};

struct TailReport {
  MatrixPart part = MatrixPart::Imag;
  int n_atoms = 0;
  double k1 = 0.0, k2 = 0.0;
  std::vector<TailTerm> terms;
  double residual = 0.0;           // ||H|k1,k2> - prediction|| / ||H|k1,k2>||
  double max_coefficient_error = 0.0;
  bool full_rank = true;           // tail states linearly independent
  cplx diagonal_measured{};        // Full only: coefficient of |k1,k2>
  cplx diagonal_predicted{};       // omega_k1 + omega_k2

  const TailTerm& term(const std::string& name) const {
    for (const auto& t : terms)
      if (t.label == name) return t;
    throw Error("no tail term " + name);
  }
};

/// Apply H^I (or H_eff) to |k1,k2> and decompose the result onto the
/// analytic tail states. The measured coefficients come from a least-squares
/// fit on the tail states; the residual compares against the full prediction.
inline TailReport two_excitation_tails(const ChainConfig& cfg, double k1, double k2, MatrixPart part,
                                      const CMatrix& one_excitation) {
  cfg.validate();
  const auto& wg = cfg.waveguide_model();
  if (part == MatrixPart::Real) throw ConfigError("tails are defined for H^I or the full H_eff");
  if (!on_grid(cfg, k1) || !on_grid(cfg, k2))
    throw ConfigError("tail wavenumbers must lie on the 2 pi/(N d) grid");
  if (std::abs(std::remainder((k1 - k2) * cfg.spacing, 2.0 * pi)) < 1e-9)
    throw ConfigError("tail wavenumbers must satisfy k1 != k2");
  if (std::abs(std::remainder((k1 + k2) * cfg.spacing, 2.0 * pi)) < 1e-9)
    throw ConfigError("tail wavenumbers must satisfy k1 != -k2");

  if (one_excitation.rows() != cfg.n_atoms) throw Error("one-excitation matrix does not match the chain");
  const SectorMatrix full{SectorBasis::two(cfg.n_atoms), MatrixPart::Full, lift_to_two_excitation(one_excitation)};
  const CMatrix h = part == MatrixPart::Imag ? imag_part(full).entries : full.entries;
  const SectorBasis& basis = full.basis;
  const PairTailAmplitudes amp{cfg, k1, k2};
  const double a = wg.k1d, n = cfg.n_atoms, gam = wg.gamma1d;
  const double kk = k1 + k2;
  const CVector ket = pair_bloch_state(cfg, basis, k1, k2);
  const CVector applied = h * ket;

  std::vector<CVector> states;
  TailReport rep;
  rep.part = part;
  rep.n_atoms = cfg.n_atoms;
  rep.k1 = k1;
  rep.k2 = k2;
  CVector prediction = CVector::Zero(basis.dimension());
  const auto add = [&](std::string label, cplx coef, CVector state) {
    prediction += coef * state;
    states.push_back(std::move(state));
    rep.terms.push_back({std::move(label), coef, cplx{}});
  };

  if (part == MatrixPart::Imag) {
    const double pre = n * gam / 4.0;
    for (int eps : {+1, -1}) {
      const std::string s = eps > 0 ? "+" : "-";
      add("g" + s, pre * amp.g(k1, eps), symmetrized_pair_state(cfg, basis, k2, eps * a));
      add("h" + s, -pre * amp.h(k2, eps), symmetrized_pair_state(cfg, basis, k1, eps * a));
      add("c" + s, pre * amp.c(eps), symmetrized_pair_state(cfg, basis, kk - eps * a, eps * a));
    }
  } else {
    const BlochTheory theory(cfg);
    const cplx pre = -I * n * gam / 2.0;
    rep.diagonal_predicted = theory.omega(k1) + theory.omega(k2);
    add("diag", rep.diagonal_predicted, ket);
    add("g+", pre * amp.g(k1, +1), symmetrized_pair_state(cfg, basis, a, k2));
    add("h-", -pre * amp.h(k2, -1), symmetrized_pair_state(cfg, basis, -a, k1));
    add("c-", pre * amp.c(-1), pair_bloch_state(cfg, basis, -a, kk + a));
    add("c+", pre * amp.c(+1), pair_bloch_state(cfg, basis, kk - a, a));
  }

  CMatrix t(basis.dimension(), static_cast<Eigen::Index>(states.size()));
  for (std::size_t j = 0; j < states.size(); ++j) t.col(static_cast<Eigen::Index>(j)) = states[j];
  const auto cod = t.completeOrthogonalDecomposition();
  rep.full_rank = cod.rank() == t.cols();
  const CVector coef = cod.solve(applied);
  for (std::size_t j = 0; j < rep.terms.size(); ++j) {
    rep.terms[j].measured = coef(static_cast<Eigen::Index>(j));
    rep.max_coefficient_error =
        std::max(rep.max_coefficient_error, std::abs(rep.terms[j].measured - rep.terms[j].predicted));
  }
  if (part == MatrixPart::Full) rep.diagonal_measured = rep.terms.front().measured;
  rep.residual = (applied - prediction).norm() / std::max(applied.norm(), 1e-300);
  return rep;
}

inline TailReport two_excitation_tails(const ChainConfig& cfg, double k1, double k2, MatrixPart part) {
  return two_excitation_tails(cfg, k1, k2, part, build_waveguide_one_excitation(cfg).entries);
}

struct TailSuppressionPoint {
  int n_atoms = 0;
  double fermionic_tail = 0.0;  // ||H^I F|| / ||F||
  double symmetric_tail = 0.0;  // ||H^I S|| / ||S||
  double ratio = 0.0;           // symmetric / fermionic
};

/// Tails of antisymmetric versus symmetric products of the two lowest center
/// modes; the antisymmetric combination leaks less, increasingly so with N.
inline TailSuppressionPoint fermionic_tail_suppression(const ChainConfig& cfg) {
  const SpectralResult one = eigendecompose(build_waveguide_one_excitation(cfg));
  const auto labels = classify_modes(one, cfg);
  const auto m1 = find_mode(labels, Branch::Center, 1), m2 = find_mode(labels, Branch::Center, 2);
  if (!m1 || !m2) throw Error("chain has fewer than two subradiant center modes");
  const SectorMatrix hi = imag_part(build_two_excitation(cfg));
  const CVector u = one.vector(*m1), v = one.vector(*m2);
  CVector f(hi.basis.dimension()), s(hi.basis.dimension());
  for (int i = 0; i < hi.basis.dimension(); ++i) {
    const auto [m, n] = hi.basis.sites(i);
    f(i) = u(m) * v(n) - v(m) * u(n);
    s(i) = u(m) * v(n) + v(m) * u(n);
  }
  TailSuppressionPoint pt;
  pt.n_atoms = cfg.n_atoms;
  pt.fermionic_tail = (hi.entries * f).norm() / f.norm();
  pt.symmetric_tail = (hi.entries * s).norm() / s.norm();
  pt.ratio = pt.symmetric_tail / pt.fermionic_tail;
  return pt;
}

} // namespace subrad
