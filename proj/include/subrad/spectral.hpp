#pragma once

// Dense non-Hermitian eigendecomposition, dark/superradiant split and
// quasi-momentum labelling of one-excitation modes.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include "subrad/geometry.hpp"

namespace subrad {

struct SpectralResult {
  std::vector<cplx> eigenvalues;  // sorted by decay rate
  std::vector<double> decay_rates;
  std::vector<double> shifts;
  std::vector<double> residuals;
  std::vector<int> ordering;      // ordering[j] = index in the raw solver output
  CMatrix eigenvectors;           // column j belongs to eigenvalues[j]
  double norm_estimate = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  }
  CVector vector(int j) const { return eigenvectors.col(j); }
};

/// Spectral-norm estimate by power iteration on H^dagger H.
inline double spectral_norm_estimate(const CMatrix& h, int iterations = 200) {
  const int n = static_cast<int>(h.cols());
  if (n == 0) return 0.0;
  CVector v = CVector::Ones(n);
  for (int j = 0; j < n; ++j) v(j) += cplx(0.0, 1e-3 * j);  // avoid symmetric dead spots
  v.normalize();
  double sigma = 0.0;
  for (int it = 0; it < iterations; ++it) {
    CVector w = h.adjoint() * (h * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = std::sqrt(nw);
    v = w / nw;
    if (std::abs(next - sigma) <= 1e-13 * next) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return std::max(sigma, h.cwiseAbs().maxCoeff());
}

/// Rotate v so that its largest-magnitude component is real and positive.
inline void fix_phase(Eigen::Ref<CVector> v) {
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  const double mag = std::abs(v(imax));
  if (mag > 0.0) v *= std::conj(v(imax)) / mag;
}

inline constexpr double residual_tolerance = 1e-8;

/// All right eigenpairs of H, unit-normalised, sorted by (gamma, omega, index).
inline SpectralResult eigendecompose(const CMatrix& h, double tolerance = residual_tolerance) {
  const int n = static_cast<int>(h.rows());
  if (n < 1 || h.cols() != n) throw Error("eigendecompose: need a non-empty square matrix");
  if (!h.allFinite()) throw Error("eigendecompose: non-finite matrix entries");

  CMatrix a = h;  // zgeev overwrites its input
  std::vector<cplx> w(static_cast<std::size_t>(n));
  CMatrix vr(n, n);
  cplx dummy{};
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, w.data(),
                                        &dummy, 1, vr.data(), n);
  if (info != 0)
    throw ConvergenceError("zgeev failed (info = " + std::to_string(info) + ")",
                           static_cast<int>(info), std::nan(""));

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    const double gx = -2.0 * w[x].imag(), gy = -2.0 * w[y].imag();
    if (gx != gy) return gx < gy;
    if (w[x].real() != w[y].real()) return w[x].real() < w[y].real();
    return x < y;
  });

  SpectralResult res;
  res.norm_estimate = spectral_norm_estimate(h);
  res.ordering = order;
  res.eigenvectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    CVector v = vr.col(src);
    v.normalize();
    fix_phase(v);
    const cplx lam = w[static_cast<std::size_t>(src)];
    res.eigenvalues.push_back(lam);
    res.decay_rates.push_back(-2.0 * lam.imag());
    res.shifts.push_back(lam.real());
    res.residuals.push_back((h * v - lam * v).norm());
    res.eigenvectors.col(j) = v;
  }
  const double bound = tolerance * std::max(res.norm_estimate, 1e-300);
  if (res.max_residual() >= bound)
    throw ConvergenceError("eigenpair residual " + std::to_string(res.max_residual()) +
                               " exceeds the bound relative to ||H||",
                           0, res.max_residual());
  return res;
}

inline SpectralResult eigendecompose(const SectorMatrix& h, double tolerance = residual_tolerance) {
  return eigendecompose(h.entries, tolerance);
}

/// Unit Bloch vector N^{-1/2} sum_m exp(i k z_m) |e_m>; k may be complex.
inline CVector bloch_vector(const ChainConfig& cfg, cplx k) {
  CVector v(cfg.n_atoms);
  for (int m = 0; m < cfg.n_atoms; ++m) v(m) = std::exp(I * k * cfg.position(m));
  return v / std::sqrt(static_cast<double>(cfg.n_atoms));
}

struct DarkSplit {
  CMatrix superradiant_basis;  // N x 2, orthonormal, spans |k1D>, |-k1D>
  CMatrix dark_projector;      // N x N, rank N - 2
  double overlap = 0.0;        // |<k1D|-k1D>|
  double leakage = 0.0;        // ||H^I P_DS||_F
  int dark_rank = 0;
};

inline DarkSplit dark_superradiant_split(const SectorMatrix& hi, const ChainConfig& cfg) {
  if (hi.part != MatrixPart::Imag || hi.basis.sector() != Sector::OneExcitation)
    throw Error("dark_superradiant_split expects the one-excitation H^I");
  cfg.validate();
  const double k = cfg.waveguide_model().k1d;
  if (std::abs(std::sin(cfg.phase())) <= resonance_epsilon)
    throw ConfigError("superradiant modes are degenerate at mirror spacing");
  const int n = cfg.n_atoms;
  if (n < 3) throw ConfigError("dark space needs N >= 3");
  const CVector plus = bloch_vector(cfg, k);
  const CVector minus = bloch_vector(cfg, -k);
  DarkSplit out;
  out.overlap = std::abs(plus.dot(minus));
  CVector second = minus - plus * plus.dot(minus);
  second.normalize();
  out.superradiant_basis.resize(n, 2);
  out.superradiant_basis.col(0) = plus;
  out.superradiant_basis.col(1) = second;
  out.dark_projector = CMatrix::Identity(n, n) - out.superradiant_basis * out.superradiant_basis.adjoint();
  out.leakage = (hi.entries * out.dark_projector).norm();
  out.dark_rank = static_cast<int>(std::lround(out.dark_projector.trace().real()));
  return out;
}

enum class ModeKind { Subradiant, Superradiant, Unclassified };

inline const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::Subradiant: return "subradiant";
    case ModeKind::Superradiant: return "superradiant";
    case ModeKind::Unclassified: return "unclassified";
  }
  return "?";
}

struct ModeLabel {
  int mode = 0;  // index into SpectralResult ordering
  ModeKind kind = ModeKind::Unclassified;
  Branch branch = Branch::Center;
  int xi = 0;    // 1-based within the branch, 0 unless subradiant
  double dominant_k = 0.0;
  double gamma = 0.0;
};

struct FourierPeak {
  double k = 0.0;
  double center_weight = 0.0;  // max |DFT| inside the light cone
  double edge_weight = 0.0;    // max |DFT| outside it
};

/// Zero-padded DFT peak of a site-space amplitude profile, with quadratic
/// interpolation around the maximum bin. `cone` is the dimensionless light
/// cone |k0 d| folded into [0, pi] that separates the two bands.
inline FourierPeak fourier_peak(const CVector& v, double d, double cone = pi / 2.0, int pad_factor = 16) {
  const int n = static_cast<int>(v.size());
  const int m = std::max(pad_factor * n, 8);
  std::vector<double> mag(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const cplx w = std::exp(-I * (2.0 * pi * j / m));
    cplx s{};
    for (int i = n - 1; i >= 0; --i) s = s * w + v(i);  // Horner
    mag[static_cast<std::size_t>(j)] = std::abs(s);
  }
  const auto wavenumber = [&](double bin) {
    double q = 2.0 * pi * bin / m;
    if (q > pi) q -= 2.0 * pi;
    return q / d;
  };
  FourierPeak out;
  int best = 0;
  for (int j = 0; j < m; ++j) {
    const double q = std::abs(wavenumber(j)) * d;
    auto& slot = q < cone ? out.center_weight : out.edge_weight;
    slot = std::max(slot, mag[static_cast<std::size_t>(j)]);
    if (mag[static_cast<std::size_t>(j)] > mag[static_cast<std::size_t>(best)]) best = j;
  }
  const double ym = mag[static_cast<std::size_t>((best - 1 + m) % m)];
  const double y0 = mag[static_cast<std::size_t>(best)];
  const double yp = mag[static_cast<std::size_t>((best + 1) % m)];
  const double denom = ym - 2.0 * y0 + yp;
  const double shift = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
  out.k = wavenumber(best + std::clamp(shift, -0.5, 0.5));
  return out;
}

/// Label every mode of a one-excitation spectrum. Modes with gamma below half
/// the single-emitter rate are subradiant and get a branch (inside or outside
/// the light cone) and a rank xi.
/// xi counts outward from the branch edge (k = 0 or pi/d) by dominant
/// wavenumber, not by gamma: on short chains a mid-band mode can decay
/// slower than the first edge mode.
inline std::vector<ModeLabel> classify_modes(const SpectralResult& res, const ChainConfig& cfg) {
  if (res.eigenvectors.rows() != cfg.n_atoms)
    throw Error("classify_modes expects a one-excitation spectrum of this chain");
  const double threshold = 0.5 * cfg.rate();
  const double cone = std::acos(std::cos(cfg.phase()));  // bands meet at the pole of omega(k)
  std::vector<ModeLabel> labels;
  for (int j = 0; j < res.size(); ++j) {
    ModeLabel lab;
    lab.mode = j;
    lab.gamma = res.decay_rates[static_cast<std::size_t>(j)];
    const FourierPeak peak = fourier_peak(res.eigenvectors.col(j), cfg.spacing, cone);
    lab.dominant_k = peak.k;
    lab.branch = std::abs(peak.k) * cfg.spacing < cone ? Branch::Center : Branch::Edge;
    const double main = std::max(peak.center_weight, peak.edge_weight);
    const double other = std::min(peak.center_weight, peak.edge_weight);
    if (lab.gamma >= threshold) {
      lab.kind = ModeKind::Superradiant;
    } else if (other > 0.9 * main) {
      lab.kind = ModeKind::Unclassified;
    } else {
      lab.kind = ModeKind::Subradiant;
    }
    labels.push_back(lab);
  }
  const auto edge_distance = [&](const ModeLabel& l) {
    const double q = std::abs(l.dominant_k) * cfg.spacing;
    return l.branch == Branch::Center ? q : pi - q;
  };
  for (Branch b : {Branch::Center, Branch::Edge}) {
    std::vector<int> members;
    for (const auto& l : labels)
      if (l.kind == ModeKind::Subradiant && l.branch == b) members.push_back(l.mode);
    std::stable_sort(members.begin(), members.end(), [&](int x, int y) {
      const double dx = edge_distance(labels[static_cast<std::size_t>(x)]);
      const double dy = edge_distance(labels[static_cast<std::size_t>(y)]);
      if (std::abs(dx - dy) > 1e-9) return dx < dy;
      return x < y;  // already gamma-ordered
    });
    for (std::size_t r = 0; r < members.size(); ++r) labels[static_cast<std::size_t>(members[r])].xi = static_cast<int>(r) + 1;
  }
  return labels;
}

/// Mode index of the xi-th subradiant mode on a branch, if present.
inline std::optional<int> find_mode(const std::vector<ModeLabel>& labels, Branch branch, int xi) {
  for (const auto& l : labels)
    if (l.kind == ModeKind::Subradiant && l.branch == branch && l.xi == xi) return l.mode;
  return std::nullopt;
}

inline std::vector<int> branch_modes(const std::vector<ModeLabel>& labels, Branch branch) {
  std::vector<int> out;
  for (const auto& l : labels)
    if (l.kind == ModeKind::Subradiant && l.branch == branch) out.push_back(l.mode);
  return out;
}

} // namespace subrad
