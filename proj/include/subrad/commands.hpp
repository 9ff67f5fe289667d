#pragma once

// Subcommand drivers. Each one expands the sweep axes into points, evaluates
// them on the worker pool, then writes tables in input order and a manifest.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "subrad/output.hpp"
#include "subrad/verify.hpp"

namespace subrad {

struct SweepPoint {
  int n_atoms = 0;
  double phase_pi = 0.0;

  std::string id() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "N%d_phase%g", n_atoms, phase_pi);
    return buf;
  }
};

inline std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (double p : cfg.phases)
    for (int n : cfg.n_atoms) pts.push_back({n, p});
  return pts;
}

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::string> files;
};

namespace detail {

template <class R, class W>
void collect(RunWriter& out, const std::vector<SweepPoint>& pts, const std::vector<PointResult<R>>& results,
             W&& write) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PointRecord rec{pts[i].id(), "ok", "", results[i].wall_seconds};
    if (results[i].value) {
      try {
        write(pts[i], *results[i].value);
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
      }
    } else {
      rec.status = "failed";
      rec.error = results[i].error;
    }
    out.record(std::move(rec));
  }
}

inline LambShiftForm shift_form(const RunConfig& cfg) {
  return cfg.lamb_shift_form == "tabulated" ? LambShiftForm::Tabulated : LambShiftForm::Curvature;
}

} // namespace detail

// ---- spectrum ------------------------------------------------------------------

struct SpectrumPoint {
  SectorMatrix matrix;
  SpectralResult spectrum;
  std::vector<ModeLabel> labels;
};

inline void cmd_spectrum(const RunConfig& cfg, RunWriter& out) {
  const auto pts = sweep_points(cfg);
  const auto results = parallel_map(pts, cfg.jobs, [&](const SweepPoint& p) {
    const ChainConfig chain = cfg.chain(p.n_atoms, p.phase_pi);
    SpectrumPoint sp{build_one_excitation(chain), {}, {}};
    sp.spectrum = eigendecompose(sp.matrix, cfg.tol.residual);
    sp.labels = classify_modes(sp.spectrum, chain);
    return sp;
  });
  detail::collect(out, pts, results, [&](const SweepPoint& p, const SpectrumPoint& sp) {
    Table t{"spectrum_" + p.id(), {"index", "omega", "gamma", "residual", "kind", "branch", "xi", "dominant_k"}, {}};
    for (int j = 0; j < sp.spectrum.size(); ++j) {
      const ModeLabel& l = sp.labels[static_cast<std::size_t>(j)];
      t.add({cell(j), cell(sp.spectrum.shifts[static_cast<std::size_t>(j)]),
             cell(sp.spectrum.decay_rates[static_cast<std::size_t>(j)]),
             cell(sp.spectrum.residuals[static_cast<std::size_t>(j)]), cell(to_string(l.kind)),
             cell(l.kind == ModeKind::Superradiant ? "-" : to_string(l.branch)), cell(l.xi), cell(l.dominant_k)});
    }
    out.write(t);
    if (cfg.include_eigenvectors)
      out.write_text("spectrum_" + p.id() + "_full.json",
                     spectrum_json(sp.spectrum, sp.labels, true).dump() + "\n");
    if (cfg.matrix_export == "json") out.write_text("matrix_" + p.id() + ".json", matrix_to_json(sp.matrix));
    if (cfg.matrix_export == "binary") out.write_binary("matrix_" + p.id() + ".bin", matrix_to_binary(sp.matrix));
  });
}

// ---- scaling -------------------------------------------------------------------

struct ScalingRow {
  int n = 0;
  Branch branch = Branch::Center;
  int xi = 0;
  double gamma_numeric = 0.0, gamma_analytic = 0.0;
  double omega_numeric = 0.0, omega_analytic = 0.0;
  cplx delta{}, delta_closed{};
  double root_residual = 0.0;
};

inline std::vector<ScalingRow> scaling_point(const RunConfig& cfg, const SweepPoint& p) {
  const ChainConfig chain = cfg.chain(p.n_atoms, p.phase_pi);
  const SpectralResult res = eigendecompose(build_waveguide_one_excitation(chain), cfg.tol.residual);
  const auto labels = classify_modes(res, chain);
  NewtonOptions opt;
  opt.tolerance = cfg.tol.newton;
  std::vector<ScalingRow> rows;
  for (Branch b : cfg.branches())
    for (int xi = 1; xi <= cfg.xi_max && 4 * xi <= p.n_atoms; ++xi) {
      const auto mode = find_mode(labels, b, xi);
      if (!mode) continue;
      ScalingRow r;
      r.n = p.n_atoms;
      r.branch = b;
      r.xi = xi;
      r.gamma_numeric = res.decay_rates[static_cast<std::size_t>(*mode)];
      r.omega_numeric = res.shifts[static_cast<std::size_t>(*mode)];
      r.gamma_analytic = analytic_decay(chain, xi, b);
      r.omega_analytic = analytic_shift(chain, xi, b, detail::shift_form(cfg));
      const ComplexWavenumber k = solve_complex_k(chain, xi, b, opt);
      r.delta = k.delta;
      r.delta_closed = delta_closed_form(chain, xi, b);
      r.root_residual = k.residual;
      rows.push_back(r);
    }
  return rows;
}

inline void cmd_scaling(const RunConfig& cfg, RunWriter& out) {
  if (cfg.model == "free_space") {
    for (double phase : cfg.phases) {
      char tag[32];
      std::snprintf(tag, sizeof tag, "phase%g", phase);
      const auto t0 = std::chrono::steady_clock::now();
      PointRecord rec{std::string("universality_") + tag, "ok", "", 0.0};
      try {
        Table status{std::string("scaling3d_status_") + tag, {"phase", "status"}, {}};
        const ChainConfig base = cfg.chain(cfg.n_atoms.front(), phase);
        if (!base.subradiant_regime()) {
          status.add({cell(phase), cell("no subradiant regime")});
          out.write(status);
        } else {
          const Universality3DReport rep = universality_check_3d(base, cfg.n_atoms, cfg.xi_max);
          Table t{std::string("scaling3d_") + tag, {"N", "xi", "gamma", "ansatz_overlap", "center_subradiant"}, {}};
          for (const auto& pt : rep.points)
            for (std::size_t x = 0; x < pt.gammas.size(); ++x)
              t.add({cell(pt.n_atoms), cell(static_cast<int>(x + 1)), cell(pt.gammas[x]), cell(pt.overlaps[x]),
                     cell(pt.center_subradiant)});
          out.write(t);
          Table f{std::string("scaling3d_fit_") + tag, {"xi", "status", "exponent", "prefactor", "r2", "points"}, {}};
          for (int xi = 1; xi <= cfg.xi_max; ++xi) {
            std::vector<std::pair<double, double>> s;
            for (const auto& pt : rep.points) s.emplace_back(pt.n_atoms, pt.gammas[static_cast<std::size_t>(xi - 1)]);
            try {
              const ScalingFit fit = fit_scaling(s);
              f.add({cell(xi), cell("ok"), cell(fit.exponent), cell(fit.prefactor), cell(fit.r_squared),
                     cell(static_cast<int>(s.size()))});
            } catch (const ConfigError& e) {
              f.add({cell(xi), cell(std::string("refused: ") + e.what()), cell(std::nan("")), cell(std::nan("")),
                     cell(std::nan("")), cell(static_cast<int>(s.size()))});
            }
          }
          out.write(f);
          status.add({cell(phase), cell(rep.edge_only ? "edge-only subradiant family" : "center modes present")});
          out.write(status);
        }
      } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
      }
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.record(rec);
    }
    return;
  }

  const auto pts = sweep_points(cfg);
  const auto results = parallel_map(pts, cfg.jobs, [&](const SweepPoint& p) { return scaling_point(cfg, p); });
  std::map<double, std::vector<ScalingRow>> by_phase;
  detail::collect(out, pts, results, [&](const SweepPoint& p, const std::vector<ScalingRow>& rows) {
    auto& dst = by_phase[p.phase_pi];
    dst.insert(dst.end(), rows.begin(), rows.end());
  });
  for (double phase : cfg.phases) {
    char tag[32];
    std::snprintf(tag, sizeof tag, "phase%g", phase);
    const auto& rows = by_phase[phase];
    Table t{std::string("scaling_") + tag,
            {"N", "branch", "xi", "gamma_numeric", "gamma_analytic", "omega_numeric", "omega_analytic", "delta_re",
             "delta_im", "delta_closed_re", "delta_closed_im", "root_residual"},
            {}};
    for (const auto& r : rows)
      t.add({cell(r.n), cell(to_string(r.branch)), cell(r.xi), cell(r.gamma_numeric), cell(r.gamma_analytic),
             cell(r.omega_numeric), cell(r.omega_analytic), cell(r.delta.real()), cell(r.delta.imag()),
             cell(r.delta_closed.real()), cell(r.delta_closed.imag()), cell(r.root_residual)});
    out.write(t);
    Table f{std::string("scaling_fit_") + tag,
            {"branch", "xi", "N", "value", "fit_status", "fit_exponent", "fit_prefactor", "r2"},
            {}};
    for (Branch b : cfg.branches())
      for (int xi = 1; xi <= cfg.xi_max; ++xi) {
        std::vector<std::pair<double, double>> s;
        for (const auto& r : rows)
          if (r.branch == b && r.xi == xi) s.emplace_back(r.n, r.gamma_numeric);
        if (s.empty()) continue;
        std::string status = "ok";
        ScalingFit fit;
        try {
          fit = fit_scaling(s);
        } catch (const ConfigError& e) {
          status = std::string("refused: ") + e.what();
          fit.exponent = fit.prefactor = fit.r_squared = std::nan("");
        }
        for (const auto& [n, v] : s)
          f.add({cell(to_string(b)), cell(xi), cell(static_cast<int>(n)), cell(v), cell(status), cell(fit.exponent),
                 cell(fit.prefactor), cell(fit.r_squared)});
      }
    out.write(f);
  }
}

// ---- fig2 ------------------------------------------------------------------------

struct Fig2Point {
  TwoExcitationAnalysis analysis;
  Fig2Report report;
  double baseline = std::nan("");
};

inline void cmd_fig2(const RunConfig& cfg, RunWriter& out) {
  const auto pts = sweep_points(cfg);
  const auto results = parallel_map(pts, cfg.jobs, [&](const SweepPoint& p) {
    Fig2Point fp;
    fp.analysis = analyze_two_excitation(cfg.chain(p.n_atoms, p.phase_pi));
    fp.report = fig2_analysis(fp.analysis, cfg.fig2_states, cfg.fig2_window);
    if (cfg.random_samples > 0) fp.baseline = random_state_baseline(fp.analysis, cfg.random_samples, cfg.seed);
    return fp;
  });
  detail::collect(out, pts, results, [&](const SweepPoint& p, const Fig2Point& fp) {
    Table t{"fig2_fidelity_" + p.id(), {"state_index", "gamma", "omega", "max_fidelity", "pair_a", "pair_b", "dip"}, {}};
    for (const auto& r : fp.report.rows) {
      const bool dip = std::find(fp.report.dips.begin(), fp.report.dips.end(), r.state) != fp.report.dips.end();
      t.add({cell(r.state + 1), cell(r.gamma), cell(r.omega), cell(r.best.fidelity), cell(r.best.a + 1),
             cell(r.best.b + 1), cell(dip ? 1 : 0)});
    }
    out.write(t);
    // reference fermionic state: most subradiant non-dip state in the window
    std::vector<int> chosen;
    for (const auto& r : fp.report.rows)
      if (std::find(fp.report.dips.begin(), fp.report.dips.end(), r.state) == fp.report.dips.end()) {
        chosen.push_back(r.state);
        break;
      }
    chosen.insert(chosen.end(), fp.report.dips.begin(), fp.report.dips.end());
    for (int s : chosen) {
      const PositionDistribution pd = position_distribution(fp.analysis.eigenstate(s));
      const std::string tag = p.id() + "_state" + std::to_string(s + 1);
      Table pm{"fig2_pmatrix_" + tag, {"m", "n", "p"}, {}};
      for (int m = 0; m < pd.p.rows(); ++m)
        for (int n = 0; n < pd.p.cols(); ++n) pm.add({cell(m + 1), cell(n + 1), cell(pd.p(m, n))});
      out.write(pm);
      Table band{"fig2_band_" + tag, {"r", "S"}, {}};
      for (std::size_t r = 0; r < pd.band.size(); ++r) band.add({cell(static_cast<int>(r)), cell(pd.band[r])});
      out.write(band);
    }
    if (cfg.random_samples > 0) {
      Table b{"fig2_baseline_" + p.id(), {"samples", "seed", "mean_max_fidelity"}, {}};
      b.add({cell(cfg.random_samples), cell(std::to_string(cfg.seed)), cell(fp.baseline)});
      out.write(b);
    }
  });
}

// ---- ansatz ----------------------------------------------------------------------

struct AnsatzRow {
  Branch branch = Branch::Center;
  int xi = 0;
  cplx k{};
  double fidelity_exact = 0.0, fidelity_leading = 0.0;
  double eigenvalue_gap = 0.0;  // |lambda_numeric - omega(k_root)|
};

inline void cmd_ansatz(const RunConfig& cfg, RunWriter& out) {
  const auto pts = sweep_points(cfg);
  const auto results = parallel_map(pts, cfg.jobs, [&](const SweepPoint& p) {
    const ChainConfig chain = cfg.chain(p.n_atoms, p.phase_pi);
    const SpectralResult res = eigendecompose(build_waveguide_one_excitation(chain), cfg.tol.residual);
    const auto labels = classify_modes(res, chain);
    const BlochTheory th(chain);
    std::vector<AnsatzRow> rows;
    for (Branch b : cfg.branches())
      for (int xi = 1; xi <= cfg.xi_max && 4 * xi <= p.n_atoms; ++xi) {
        const auto mode = find_mode(labels, b, xi);
        if (!mode) continue;
        const AnsatzState st = ansatz_state(chain, xi, b);
        AnsatzRow r{b, xi, st.root.k, fidelity(st.exact, res.vector(*mode)), fidelity(st.leading, res.vector(*mode)),
                    std::abs(res.eigenvalues[static_cast<std::size_t>(*mode)] - th.omega(st.root.k))};
        rows.push_back(r);
      }
    return rows;
  });
  detail::collect(out, pts, results, [&](const SweepPoint& p, const std::vector<AnsatzRow>& rows) {
    Table t{"ansatz_" + p.id(),
            {"branch", "xi", "k_re", "k_im", "fidelity_exact", "fidelity_leading", "eigenvalue_gap"},
            {}};
    for (const auto& r : rows)
      t.add({cell(to_string(r.branch)), cell(r.xi), cell(r.k.real()), cell(r.k.imag()), cell(r.fidelity_exact),
             cell(r.fidelity_leading), cell(r.eigenvalue_gap)});
    out.write(t);
  });
}

// ---- effective -------------------------------------------------------------------

struct EffectivePoint {
  EffectiveHamiltonian eh;
  std::vector<double> full_numeric;  // lowest two-excitation decay rates, empty if skipped
  double identity = std::nan("");
  double fermionized = 0.0;
};

inline void cmd_effective(const RunConfig& cfg, RunWriter& out) {
  const Branch branch = cfg.branch == "center" ? Branch::Center : Branch::Edge;
  const GammaSource source = cfg.gamma_source == "analytic" ? GammaSource::Analytic : GammaSource::Numeric;
  const auto pts = sweep_points(cfg);
  const auto results = parallel_map(pts, cfg.jobs, [&](const SweepPoint& p) {
    const ChainConfig chain = cfg.chain(p.n_atoms, p.phase_pi);
    EffectivePoint ep{build_effective_H(chain, cfg.xi_max, branch, source), {}, std::nan(""), 0.0};
    ep.fermionized = fermionized_overlap(ep.eh);
    if (p.n_atoms <= cfg.full_numeric_max_n) {
      const SpectralResult two = eigendecompose(build_two_excitation(chain), cfg.tol.residual);
      ep.full_numeric = two.decay_rates;
    }
    if (p.n_atoms <= 12) ep.identity = vsub_identity_check(p.n_atoms, cfg.gamma);
    return ep;
  });
  Table summary{"effective_summary",
                {"N", "phase", "xi_max", "m_star", "c_LL", "L", "m_star_c_LL", "max_mode_overlap",
                 "tg_deviation_lowest3", "fermionized_overlap", "vsub_identity_deviation"},
                {}};
  detail::collect(out, pts, results, [&](const SweepPoint& p, const EffectivePoint& ep) {
    const auto tg = tonks_girardeau_spectrum(ep.eh.gammas);
    Table t{"effective_" + p.id(), {"index", "gamma_H", "gamma_free_fermion", "gamma_full_numeric"}, {}};
    for (std::size_t j = 0; j < ep.eh.decay_rates.size(); ++j) {
      const double free = j < tg.size() ? tg[j] : std::nan("");
      const double full = j < ep.full_numeric.size() ? ep.full_numeric[j] : std::nan("");
      t.add({cell(static_cast<int>(j)), cell(ep.eh.decay_rates[j]), cell(free), cell(full)});
    }
    out.write(t);
    summary.add({cell(p.n_atoms), cell(p.phase_pi), cell(ep.eh.xi_max), cell(ep.eh.mass), cell(ep.eh.coupling),
                 cell(ep.eh.length), cell(ep.eh.mass * ep.eh.coupling), cell(ep.eh.max_mode_overlap),
                 cell(tonks_girardeau_deviation(ep.eh, 3)), cell(ep.fermionized), cell(ep.identity)});
  });
  out.write(summary);
}

// ---- verify ----------------------------------------------------------------------

inline int cmd_verify(const RunConfig& cfg, RunWriter& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const VerifyReport rep = run_verify_suite(cfg);
  Table t{"verify", {"check", "value", "tolerance", "passed", "error"}, {}};
  nlohmann::json j;
  j["passed"] = rep.passed();
  j["fault_injection"] = cfg.fault_injection;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : rep.checks) {
    t.add({cell(c.name), cell(c.value), cell(c.tolerance), cell(c.passed ? 1 : 0), cell(c.error)});
    checks.push_back({{"name", c.name}, {"value", std::isfinite(c.value) ? nlohmann::json(c.value) : nlohmann::json()},
                      {"tolerance", c.tolerance}, {"passed", c.passed}, {"error", c.error}});
  }
  j["checks"] = checks;
  j["failing"] = rep.failing();
  out.write(t);
  out.write_text("verify_report.json", j.dump(2) + "\n");
  out.record({"verify", rep.passed() ? "ok" : "failed", rep.passed() ? "" : "invariant violations",
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()});
  return rep.passed() ? 0 : 1;
}

/// Run one subcommand end to end; returns the process exit status.
inline CommandOutcome run_command(Analysis a, RunConfig cfg) {
  cfg.analysis = a;
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunWriter out(cfg.output_dir, cfg);
  int code = 0;
  switch (a) {
    case Analysis::Spectrum: cmd_spectrum(cfg, out); break;
    case Analysis::Scaling: cmd_scaling(cfg, out); break;
    case Analysis::Fig2: cmd_fig2(cfg, out); break;
    case Analysis::Ansatz: cmd_ansatz(cfg, out); break;
    case Analysis::Effective: cmd_effective(cfg, out); break;
    case Analysis::Verify: code = cmd_verify(cfg, out); break;
  }
  if (a != Analysis::Verify && out.any_failed()) code = 3;
  out.write_manifest(to_string(a), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  CommandOutcome res{code, out.files()};
  res.files.push_back("manifest.json");
  return res;
}

} // namespace subrad
