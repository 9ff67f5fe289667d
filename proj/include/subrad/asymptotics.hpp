#pragma once

// Closed-form one-excitation theory of the waveguide chain: Bloch dispersion
// and tails, complex wavenumbers of the subradiant modes, their decay rates
// and Lamb shifts, eigenstate ansatz, and power-law regression.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subrad/spectral.hpp"

namespace subrad {

/// Dispersion and tail amplitudes of Bloch states on the waveguide chain.
class BlochTheory {
public:
  explicit BlochTheory(const ChainConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    if (std::abs(std::sin(cfg_.phase())) <= resonance_epsilon)
      throw ConfigError("Bloch tails are singular at mirror spacing");
    const auto& wg = cfg_.waveguide_model();
    a_ = wg.k1d;
    gamma_ = wg.gamma1d;
    d_ = cfg_.spacing;
    z1_ = cfg_.position(0);
    zn_ = cfg_.position(cfg_.n_atoms - 1);
  }

  const ChainConfig& config() const { return cfg_; }

  cplx omega(cplx k) const {
    return 0.25 * gamma_ * (cot(0.5 * (a_ + k) * d_) + cot(0.5 * (a_ - k) * d_));
  }

  cplx g(cplx k) const {
    return std::exp(I * (k - a_) * z1_) / (1.0 - std::exp(I * (k - a_) * d_));
  }

  cplx h(cplx k) const {
    return std::exp(I * (k + a_) * zn_) / (std::exp(-I * (k + a_) * d_) - 1.0);
  }

  cplx g_prime(cplx k) const {
    const cplx e = std::exp(I * (k - a_) * d_);
    const cplx lead = std::exp(I * (k - a_) * z1_);
    return I * z1_ * g(k) + lead * I * d_ * e / ((1.0 - e) * (1.0 - e));
  }

  cplx h_prime(cplx k) const {
    const cplx f = std::exp(-I * (k + a_) * d_);
    const cplx lead = std::exp(I * (k + a_) * zn_);
    return I * zn_ * h(k) + lead * I * d_ * f / ((f - 1.0) * (f - 1.0));
  }

  /// Vanishes when g_{-k}|k> - g_k|-k> has no superradiant tail.
  cplx tail_condition(cplx k) const { return g(k) * h(-k) - g(-k) * h(k); }

  cplx tail_condition_prime(cplx k) const {
    return g_prime(k) * h(-k) - g(k) * h_prime(-k) + g_prime(-k) * h(k) - g(-k) * h_prime(k);
  }

  /// Distance from k to the nearest pole k = +-k1D (mod 2 pi / d).
  double pole_distance(double k) const {
    const double period = 2.0 * pi / d_;
    const auto dist = [&](double x) {
      const double r = std::remainder(x, period);
      return std::abs(r);
    };
    return std::min(dist(k - a_), dist(k + a_));
  }

private:
  static cplx cot(cplx x) { return std::cos(x) / std::sin(x); }

  ChainConfig cfg_;
  double a_ = 0.0, gamma_ = 1.0, d_ = 1.0, z1_ = 0.0, zn_ = 0.0;
};

struct BlochActionReport {
  double k = 0.0;
  cplx omega{};
  cplx g{};
  cplx h{};
  double residual = 0.0;  // ||H|k> - prediction|| / ||H|k>||
};

/// Compare H_eff|k> against omega_k|k> - (i Gamma/2)(g_k|k1D> - h_k|-k1D>).
inline BlochActionReport bloch_action_check(const ChainConfig& cfg, double k) {
  const BlochTheory theory(cfg);
  if (theory.pole_distance(k) < resonance_epsilon)
    throw ConfigError("Bloch wavenumber too close to the pole k = +-k1D");
  const auto& wg = cfg.waveguide_model();
  const SectorMatrix h = build_waveguide_one_excitation(cfg);
  const CVector ket = bloch_vector(cfg, k);
  const CVector lhs = h.entries * ket;
  BlochActionReport out;
  out.k = k;
  out.omega = theory.omega(k);
  out.g = theory.g(k);
  out.h = theory.h(k);
  const CVector rhs = out.omega * ket - 0.5 * I * wg.gamma1d *
                                            (out.g * bloch_vector(cfg, wg.k1d) -
                                             out.h * bloch_vector(cfg, -wg.k1d));
  out.residual = (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
  return out;
}

struct ComplexWavenumber {
  int xi = 1;
  Branch branch = Branch::Center;
  cplx delta{};
  cplx k{};
  double residual = 0.0;
  int iterations = 0;
};

struct NewtonOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;
  double damping = 0.5;
};

namespace detail {

inline void check_xi(const ChainConfig& cfg, int xi) {
  if (xi < 1) throw ConfigError("xi must be >= 1");
  if (4 * xi > cfg.n_atoms)
    throw ConfigError("xi = " + std::to_string(xi) + " exceeds N/4 for N = " +
                      std::to_string(cfg.n_atoms));
}

inline double branch_origin(const ChainConfig& cfg, Branch b) {
  return b == Branch::Center ? 0.0 : -pi / cfg.spacing;
}

} // namespace detail

/// Leading-order (real) wavenumber of the xi-th mode of a branch.
inline double seed_wavenumber(const ChainConfig& cfg, int xi, Branch b) {
  return detail::branch_origin(cfg, b) + xi * pi / (cfg.n_atoms * cfg.spacing);
}

/// Closed-form complex correction delta_xi to O(1/N^2).
inline cplx delta_closed_form(const ChainConfig& cfg, int xi, Branch b) {
  const double half = 0.5 * cfg.phase();
  const double n = cfg.n_atoms;
  const double base = xi * pi / (n * cfg.spacing);
  return b == Branch::Center ? base * (1.0 - I * (std::cos(half) / std::sin(half)) / n)
                             : base * (1.0 + I * std::tan(half) / n);
}

/// Newton iteration on the tail condition from the leading-order seed.
inline ComplexWavenumber solve_complex_k(const ChainConfig& cfg, int xi, Branch branch,
                                         const NewtonOptions& opt = {}) {
  detail::check_xi(cfg, xi);
  if (!(opt.tolerance > 0.0) || opt.max_iterations < 1 || !(opt.damping > 0.0 && opt.damping < 1.0))
    throw ConfigError("invalid Newton options");
  const BlochTheory theory(cfg);
  cplx k = seed_wavenumber(cfg, xi, branch);
  cplx f = theory.tail_condition(k);
  int it = 0;
  while (std::abs(f) >= opt.tolerance && it < opt.max_iterations) {
    ++it;
    const cplx df = theory.tail_condition_prime(k);
    if (df == cplx{}) break;
    cplx step = f / df;
    cplx next = k - step;
    cplx fn = theory.tail_condition(next);
    for (int halvings = 0; halvings < 30 && !(std::abs(fn) < std::abs(f)); ++halvings) {
      step *= opt.damping;
      next = k - step;
      fn = theory.tail_condition(next);
    }
    if (!(std::abs(fn) < std::abs(f))) break;  // stalled at the rounding floor
    k = next;
    f = fn;
  }
  if (!(std::abs(f) < opt.tolerance))
    throw ConvergenceError("Newton iteration on the tail condition did not converge", it,
                           std::abs(f));
  ComplexWavenumber out;
  out.xi = xi;
  out.branch = branch;
  out.k = k;
  out.delta = k - detail::branch_origin(cfg, branch);
  out.residual = std::abs(f);
  out.iterations = it;
  const double step = pi / (cfg.n_atoms * cfg.spacing);
  if (std::abs(out.delta.real() - xi * step) > 0.5 * step)
    throw ConvergenceError("Newton root left the basin of xi = " + std::to_string(xi), it,
                           std::abs(out.delta.real() - xi * step));
  return out;
}

/// Asymptotic decay rate, Gamma (pi^2/2) xi^2/N^3 times the branch prefactor.
inline double analytic_decay(const ChainConfig& cfg, int xi, Branch branch) {
  detail::check_xi(cfg, xi);
  cfg.validate();
  const double half = 0.5 * cfg.phase();
  const double s = std::sin(half), c = std::cos(half);
  const double n = cfg.n_atoms;
  const double pref = branch == Branch::Center ? c * c / (s * s * s * s) : s * s / (c * c * c * c);
  return cfg.waveguide_model().gamma1d * 0.5 * pi * pi * xi * xi / (n * n * n) * pref;
}

/// Curvature: quadratic term = half the second derivative of omega_k at the band
/// edge. Tabulated: the same expansion with the quadratic coefficient doubled.
enum class LambShiftForm { Curvature, Tabulated };

inline double analytic_shift(const ChainConfig& cfg, int xi, Branch branch,
                             LambShiftForm form = LambShiftForm::Curvature) {
  if (xi < 0) throw ConfigError("xi must be >= 0");
  cfg.validate();
  const double g = cfg.waveguide_model().gamma1d;
  const double half = 0.5 * cfg.phase();
  const double s = std::sin(half), c = std::cos(half);
  const double q = xi * pi / (2.0 * cfg.n_atoms);
  const double quad = form == LambShiftForm::Curvature ? 0.5 : 1.0;
  if (branch == Branch::Center) return 0.5 * g * c / s + quad * g * c / (s * s * s) * q * q;
  return -0.5 * g * s / c - quad * g * s / (c * c * c) * q * q;
}

struct AnsatzState {
  ComplexWavenumber root;
  CVector exact;    // g_{-k}|k> - g_k|-k>, unit norm
  CVector leading;  // (|k0> - |-k0>)/sqrt(2)
};

inline AnsatzState ansatz_state(const ChainConfig& cfg, int xi, Branch branch) {
  AnsatzState out;
  out.root = solve_complex_k(cfg, xi, branch);
  const BlochTheory theory(cfg);
  const cplx k = out.root.k;
  out.exact = theory.g(-k) * bloch_vector(cfg, k) - theory.g(k) * bloch_vector(cfg, -k);
  out.exact.normalize();
  const double k0 = seed_wavenumber(cfg, xi, branch);
  out.leading = (bloch_vector(cfg, k0) - bloch_vector(cfg, -k0)) / std::sqrt(2.0);
  out.leading.normalize();
  return out;
}

/// |<a|b>|^2 for unit vectors.
inline double fidelity(const CVector& a, const CVector& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

struct ScalingFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> sample;

  double predict(double n) const { return prefactor * std::pow(n, exponent); }
};

/// Least-squares fit of log(value) against log(N); two or more points.
inline ScalingFit power_law_fit(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ConfigError("power-law fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [n, v] : samples) {
    if (!(n > 0.0) || !(v > 0.0)) throw ConfigError("power-law fit needs positive samples");
    const double x = std::log(n), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(samples.size());
  const double den = m * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw ConfigError("power-law fit needs distinct abscissae");
  ScalingFit fit;
  fit.exponent = (m * sxy - sx * sy) / den;
  const double intercept = (sy - fit.exponent * sx) / m;
  fit.prefactor = std::exp(intercept);
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / m;
  for (const auto& [n, v] : samples) {
    const double y = std::log(v);
    const double r = y - (intercept + fit.exponent * std::log(n));
    ss_res += r * r;
    ss_tot += (y - ybar) * (y - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  fit.sample = samples;
  return fit;
}

/// Regression harness for scaling laws; insists on at least four samples.
inline ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 4) throw ConfigError("fit_scaling needs at least four samples");
  return power_law_fit(samples);
}

struct Universality3DPoint {
  int n_atoms = 0;
  std::vector<double> gammas;    // edge-branch gamma_xi, xi = 1..xi_max
  std::vector<double> overlaps;  // leading-order ansatz fidelity per xi
  int center_subradiant = 0;
  int edge_subradiant = 0;
};

struct Universality3DReport {
  bool subradiant_regime = false;
  std::string note;
  std::vector<Universality3DPoint> points;
  std::vector<ScalingFit> fits;  // per xi over N
  bool edge_only = false;
};

/// Subradiant-mode scaling of the free-space chain over an N sweep.
inline Universality3DReport universality_check_3d(const ChainConfig& cfg3d,
                                                  const std::vector<int>& sizes, int xi_max) {
  (void)cfg3d.free_space_model();
  Universality3DReport rep;
  if (!cfg3d.subradiant_regime()) {
    rep.note = "no subradiant regime (k0 d >= pi)";
    return rep;
  }
  if (sizes.size() < 2) throw ConfigError("universality check needs at least two chain sizes");
  if (xi_max < 1) throw ConfigError("xi_max must be >= 1");
  rep.subradiant_regime = true;
  rep.edge_only = true;
  for (int n : sizes) {
    const ChainConfig cfg = cfg3d.with_atoms(n);
    if (4 * xi_max > n) throw ConfigError("xi_max exceeds N/4");
    const SpectralResult res = eigendecompose(build_freespace_one_excitation(cfg));
    const auto labels = classify_modes(res, cfg);
    Universality3DPoint pt;
    pt.n_atoms = n;
    pt.center_subradiant = static_cast<int>(branch_modes(labels, Branch::Center).size());
    pt.edge_subradiant = static_cast<int>(branch_modes(labels, Branch::Edge).size());
    if (pt.center_subradiant > 0) rep.edge_only = false;
    for (int xi = 1; xi <= xi_max; ++xi) {
      const auto mode = find_mode(labels, Branch::Edge, xi);
      if (!mode) throw Error("edge mode xi = " + std::to_string(xi) + " not found");
      pt.gammas.push_back(res.decay_rates[static_cast<std::size_t>(*mode)]);
      const double k0 = seed_wavenumber(cfg, xi, Branch::Edge);
      const CVector lead = (bloch_vector(cfg, k0) - bloch_vector(cfg, -k0)) / std::sqrt(2.0);
      pt.overlaps.push_back(fidelity(lead, res.vector(*mode)));
    }
    rep.points.push_back(std::move(pt));
  }
  for (int xi = 1; xi <= xi_max; ++xi) {
    std::vector<std::pair<double, double>> s;
    for (const auto& p : rep.points)
      s.emplace_back(p.n_atoms, p.gammas[static_cast<std::size_t>(xi - 1)]);
    rep.fits.push_back(power_law_fit(s));
  }
  return rep;
}

} // namespace subrad
