#pragma once

// Chain configurations and effective-Hamiltonian builders for a 1D chain of
// two-level emitters, either coupled to a 1D waveguide or to the 3D vacuum.
//
// Conventions: sites are z_m = (m-1) d for m = 1..N (stored 0-based as m*d),
// H_eff = H^R - i H^I with H^R, H^I Hermitian, decay rate = -2 Im(lambda).

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "subrad/types.hpp"

namespace subrad {

/// Mirror-resonant spacings (sin(k1D d) ~ 0) make the Bloch tails singular.
inline constexpr double resonance_epsilon = 1e-9;

enum class Polarization { Parallel, Transverse };

inline const char* to_string(Polarization p) {
  return p == Polarization::Parallel ? "parallel" : "transverse";
}

struct Waveguide1D {
  double k1d = 1.0;
  double gamma1d = 1.0;
};

struct FreeSpace3D {
  double k0 = 1.0;
  double gamma0 = 1.0;
  Polarization polarization = Polarization::Transverse;
};

using FieldModel = std::variant<Waveguide1D, FreeSpace3D>;

struct ChainConfig {
  int n_atoms = 1;
  double spacing = 1.0;
  FieldModel field = Waveguide1D{};
  // Accept k1D d in pi*Z for raw matrix builds (two-atom Dicke limit etc.).
  bool allow_mirror_spacing = false;

  static ChainConfig waveguide(int n, double phase, double gamma1d = 1.0, double d = 1.0) {
    return ChainConfig{n, d, Waveguide1D{phase / d, gamma1d}, false};
  }

  static ChainConfig free_space(int n, double phase, Polarization pol, double gamma0 = 1.0,
                                double d = 1.0) {
    return ChainConfig{n, d, FreeSpace3D{phase / d, gamma0, pol}, false};
  }

  ChainConfig with_atoms(int n) const {
    ChainConfig c = *this;
    c.n_atoms = n;
    return c;
  }

  bool is_waveguide() const { return std::holds_alternative<Waveguide1D>(field); }
  bool is_free_space() const { return std::holds_alternative<FreeSpace3D>(field); }

  const Waveguide1D& waveguide_model() const {
    if (!is_waveguide()) throw ConfigError("chain is not coupled to a 1D waveguide");
    return std::get<Waveguide1D>(field);
  }
  const FreeSpace3D& free_space_model() const {
    if (!is_free_space()) throw ConfigError("chain is not coupled to 3D free space");
    return std::get<FreeSpace3D>(field);
  }

  /// Single-emitter decay rate (Gamma_1D or gamma_0).
  double rate() const {
    return is_waveguide() ? std::get<Waveguide1D>(field).gamma1d : std::get<FreeSpace3D>(field).gamma0;
  }
  /// Resonant wavenumber (k_1D or k_0).
  double wavenumber() const {
    return is_waveguide() ? std::get<Waveguide1D>(field).k1d : std::get<FreeSpace3D>(field).k0;
  }
  /// Dimensionless phase k d.
  double phase() const { return wavenumber() * spacing; }

  /// 0-based site index.
  double position(int m) const { return m * spacing; }
  double length() const { return n_atoms * spacing; }

  /// 3D chains are only subradiant below half the resonant wavelength.
  bool subradiant_regime() const { return !is_free_space() || phase() < pi; }

  void validate() const {
    if (n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("spacing must be > 0");
    if (!(rate() > 0.0) || !std::isfinite(rate())) throw ConfigError("decay rate must be > 0");
    if (!(wavenumber() > 0.0) || !std::isfinite(wavenumber()))
      throw ConfigError("resonant wavenumber must be > 0");
    if (is_waveguide() && !allow_mirror_spacing && std::abs(std::sin(phase())) <= resonance_epsilon)
      throw ConfigError("mirror-resonant spacing: |sin(k1D d)| <= 1e-9 (k1D d = " +
                        std::to_string(phase()) + ")");
  }
};

enum class Sector { OneExcitation, TwoExcitation };

/// Labelled basis of an excitation sector: |e_m> or |e_m, e_n> with m < n.
class SectorBasis {
public:
  SectorBasis() = default;
  SectorBasis(Sector sector, int n_sites) : sector_(sector), n_sites_(n_sites) {
    if (n_sites < 1) throw ConfigError("sector basis needs at least one site");
    if (sector == Sector::TwoExcitation) {
      if (n_sites < 2) throw ConfigError("two-excitation sector needs N >= 2");
      sites_.reserve(static_cast<std::size_t>(n_sites) * (n_sites - 1) / 2);
      for (int m = 0; m < n_sites; ++m)
        for (int n = m + 1; n < n_sites; ++n) sites_.emplace_back(m, n);
    } else {
      for (int m = 0; m < n_sites; ++m) sites_.emplace_back(m, -1);
    }
  }

  static SectorBasis one(int n) { return {Sector::OneExcitation, n}; }
  static SectorBasis two(int n) { return {Sector::TwoExcitation, n}; }

  Sector sector() const { return sector_; }
  int n_sites() const { return n_sites_; }
  int dimension() const { return static_cast<int>(sites_.size()); }

  /// Sites of basis state i; second is -1 in the one-excitation sector.
  std::pair<int, int> sites(int i) const { return sites_.at(static_cast<std::size_t>(i)); }

  int index(int m) const {
    if (sector_ != Sector::OneExcitation || m < 0 || m >= n_sites_)
      throw Error("invalid one-excitation site");
    return m;
  }

  /// Index of |e_m, e_n>; order of m and n does not matter, m == n is invalid.
  int index(int m, int n) const {
    if (sector_ != Sector::TwoExcitation) throw Error("not a two-excitation basis");
    if (m > n) std::swap(m, n);
    if (m < 0 || n >= n_sites_ || m == n) throw Error("invalid two-excitation pair");
    return m * (2 * n_sites_ - m - 1) / 2 + (n - m - 1);
  }

  bool operator==(const SectorBasis& o) const {
    return sector_ == o.sector_ && n_sites_ == o.n_sites_;
  }

private:
  Sector sector_ = Sector::OneExcitation;
  int n_sites_ = 0;
  std::vector<std::pair<int, int>> sites_;
};

enum class MatrixPart { Full, Real, Imag };

inline const char* to_string(MatrixPart p) {
  switch (p) {
    case MatrixPart::Full: return "full";
    case MatrixPart::Real: return "real";
    case MatrixPart::Imag: return "imag";
  }
  return "?";
}

struct SectorMatrix {
  SectorBasis basis;
  MatrixPart part = MatrixPart::Full;
  CMatrix entries;

  int dimension() const { return static_cast<int>(entries.rows()); }
};

/// H^R = (H + H^dagger)/2.
inline SectorMatrix real_part(const SectorMatrix& h) {
  if (h.part != MatrixPart::Full) throw Error("real_part expects the full H_eff");
  return {h.basis, MatrixPart::Real, (h.entries + h.entries.adjoint()) / 2.0};
}

/// H^I = i (H - H^dagger)/2, so that H = H^R - i H^I.
inline SectorMatrix imag_part(const SectorMatrix& h) {
  if (h.part != MatrixPart::Full) throw Error("imag_part expects the full H_eff");
  return {h.basis, MatrixPart::Imag, I * (h.entries - h.entries.adjoint()) / 2.0};
}

/// Hard-core lift of a one-excitation coupling J (H = sum J_mn s+_m s_n) to
/// the two-excitation sector.
inline CMatrix lift_to_two_excitation(const CMatrix& coupling) {
  const int n = static_cast<int>(coupling.rows());
  const SectorBasis basis = SectorBasis::two(n);
  CMatrix h = CMatrix::Zero(basis.dimension(), basis.dimension());
  for (int col = 0; col < basis.dimension(); ++col) {
    const auto [m, q] = basis.sites(col);
    for (int p = 0; p < n; ++p) {
      if (p != q) {
        // excitation at m hops to p
        h(p == m ? col : basis.index(p, q), col) += coupling(p, m);
      }
      if (p != m) {
        h(p == q ? col : basis.index(m, p), col) += coupling(p, q);
      }
    }
  }
  return h;
}

/// One-excitation H_eff of the waveguide chain: -(i/2) Gamma exp(i k1D |z_i - z_j|).
inline SectorMatrix build_waveguide_one_excitation(const ChainConfig& cfg) {
  cfg.validate();
  const auto& wg = cfg.waveguide_model();
  const int n = cfg.n_atoms;
  CMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h(i, j) = -0.5 * I * wg.gamma1d *
                std::exp(I * wg.k1d * std::abs(cfg.position(i) - cfg.position(j)));
  return {SectorBasis::one(n), MatrixPart::Full, std::move(h)};
}

/// Dyadic Green's tensor of the vacuum at separation r != 0.
inline Eigen::Matrix3cd green_tensor(const Eigen::Vector3d& r, double k0) {
  const double dist = r.norm();
  if (!(dist > 0.0)) throw Error("green_tensor: r = 0 (self term uses the single-atom rate)");
  if (!(k0 > 0.0)) throw Error("green_tensor: k0 must be > 0");
  const double kr = k0 * dist;
  const cplx prefactor = std::exp(I * kr) / (4.0 * pi * k0 * k0 * dist * dist * dist);
  const cplx isotropic = kr * kr + I * kr - 1.0;
  const cplx radial = -kr * kr - 3.0 * I * kr + 3.0;
  const Eigen::Vector3d u = r / dist;
  Eigen::Matrix3cd g = isotropic * Eigen::Matrix3cd::Identity();
  g += radial * (u * u.transpose()).cast<cplx>();
  return prefactor * g;
}

inline Eigen::Vector3d dipole_direction(Polarization pol) {
  // chain along x
  return pol == Polarization::Parallel ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
}

/// 3D free-space one-excitation H_eff, normalised so each diagonal entry is -i gamma0/2.
inline SectorMatrix build_freespace_one_excitation(const ChainConfig& cfg) {
  cfg.validate();
  const auto& fs = cfg.free_space_model();
  const int n = cfg.n_atoms;
  const Eigen::Vector3cd e = dipole_direction(fs.polarization).cast<cplx>();
  // -mu0 w0^2 |d|^2 absorbed so that Im(-scale G(0)) = -gamma0/2 with Im G(0) = k0/(6 pi)
  const double scale = 3.0 * pi * fs.gamma0 / fs.k0;
  CMatrix h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = -0.5 * I * fs.gamma0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Eigen::Vector3d r((cfg.position(i) - cfg.position(j)), 0.0, 0.0);
      h(i, j) = -scale * e.dot(green_tensor(r, fs.k0) * e);
    }
  }
  return {SectorBasis::one(n), MatrixPart::Full, std::move(h)};
}

/// Spectral weights of the integral representation of the 3D Hamiltonian.
inline double rho_plus(double k, double k0, Polarization pol) {
  const double x = k * k / (k0 * k0);
  return pol == Polarization::Parallel ? 2.0 * pi * (1.0 - x) : pi * (1.0 + x);
}

inline double rho_minus(double k, double k0, Polarization pol) {
  const double x = k * k / (k0 * k0);
  return pol == Polarization::Parallel ? 2.0 * pi * (1.0 + x) : pi * (1.0 - x);
}

struct QuadratureSpec {
  double rel_tol = 1e-9;
  unsigned max_depth = 20;
};

namespace detail {

template <class F>
double adaptive_integral(F f, double a, double b, const QuadratureSpec& q) {
  double err = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, q.max_depth, q.rel_tol,
                                                                    &err, &l1);
  if (err > 10.0 * q.rel_tol * std::max(l1, 1e-300) && err > 1e-15)
    throw ConvergenceError("quadrature did not converge (error estimate " + std::to_string(err) +
                               ")",
                           static_cast<int>(q.max_depth), err);
  return value;
}

} // namespace detail

/// Free-space coupling at separation r > 0 from the two wavenumber integrals
/// (propagating k in [0,k0], evanescent k in [0,inf) mapped to u in [0,1)).
inline cplx freespace_coupling_integral(double r, const FreeSpace3D& fs, const QuadratureSpec& q) {
  const double k0 = fs.k0;
  const auto pol = fs.polarization;
  const double pre = 3.0 * fs.gamma0 / (4.0 * k0) / (2.0 * pi);
  const double re1 = detail::adaptive_integral(
      [&](double k) { return rho_plus(k, k0, pol) * std::cos(k * r); }, 0.0, k0, q);
  const double im1 = detail::adaptive_integral(
      [&](double k) { return rho_plus(k, k0, pol) * std::sin(k * r); }, 0.0, k0, q);
  const double evanescent = detail::adaptive_integral(
      [&](double u) {
        if (u >= 1.0) return 0.0;
        const double k = k0 * u / (1.0 - u);
        const double jac = k0 / ((1.0 - u) * (1.0 - u));
        return rho_minus(k, k0, pol) * std::exp(-k * r) * jac;
      },
      0.0, 1.0, q);
  return -I * pre * cplx(re1, im1) - pre * evanescent;
}

inline SectorMatrix build_freespace_via_integral(const ChainConfig& cfg,
                                                 const QuadratureSpec& q = {}) {
  cfg.validate();
  if (!(q.rel_tol > 0.0)) throw ConfigError("quadrature tolerance must be > 0");
  const auto& fs = cfg.free_space_model();
  const int n = cfg.n_atoms;
  // couplings depend only on |i - j|
  std::vector<cplx> by_distance(static_cast<std::size_t>(n), cplx{});
  for (int s = 1; s < n; ++s) by_distance[s] = freespace_coupling_integral(s * cfg.spacing, fs, q);
  CMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h(i, j) = i == j ? -0.5 * I * fs.gamma0 : by_distance[static_cast<std::size_t>(std::abs(i - j))];
  return {SectorBasis::one(n), MatrixPart::Full, std::move(h)};
}

/// One-excitation H_eff for either field model.
inline SectorMatrix build_one_excitation(const ChainConfig& cfg) {
  return cfg.is_waveguide() ? build_waveguide_one_excitation(cfg)
                            : build_freespace_one_excitation(cfg);
}

/// Two-excitation H_eff (hard-core, orthonormal |e_m, e_n> basis) for either field model.
inline SectorMatrix build_two_excitation(const ChainConfig& cfg) {
  cfg.validate();
  if (cfg.n_atoms < 2) throw ConfigError("two-excitation sector needs N >= 2");
  const SectorMatrix one = build_one_excitation(cfg);
  return {SectorBasis::two(cfg.n_atoms), MatrixPart::Full, lift_to_two_excitation(one.entries)};
}

inline SectorMatrix build_waveguide_two_excitation(const ChainConfig& cfg) {
  (void)cfg.waveguide_model();
  return build_two_excitation(cfg);
}

/// max |H - H^T| (complex symmetry / reciprocity in the site basis).
inline double max_asymmetry(const CMatrix& h) { return (h - h.transpose()).cwiseAbs().maxCoeff(); }

} // namespace subrad
