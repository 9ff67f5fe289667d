#pragma once

// Flat `key = value` run configuration. Lists are comma separated, `#` starts a
// comment. Unknown keys are rejected. Phases are given in units of pi (k d / pi).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "subrad/geometry.hpp"

namespace subrad {

enum class Analysis { Spectrum, Scaling, Fig2, Ansatz, Effective, Verify };

inline const char* to_string(Analysis a) {
  switch (a) {
    case Analysis::Spectrum: return "spectrum";
    case Analysis::Scaling: return "scaling";
    case Analysis::Fig2: return "fig2";
    case Analysis::Ansatz: return "ansatz";
    case Analysis::Effective: return "effective";
    case Analysis::Verify: return "verify";
  }
  return "?";
}

inline Analysis parse_analysis(const std::string& s) {
  for (Analysis a : {Analysis::Spectrum, Analysis::Scaling, Analysis::Fig2, Analysis::Ansatz,
                     Analysis::Effective, Analysis::Verify})
    if (s == to_string(a)) return a;
  throw ConfigError("unknown analysis '" + s + "'");
}

struct Tolerances {
  double residual = 1e-8;     // eigenpair residual relative to ||H||
  double newton = 1e-12;      // |F(k)| at the root
  double quadrature = 1e-9;   // relative quadrature error
  double bloch = 1e-10;       // Bloch-action relative residual
  double identity = 1e-12;    // on-site vs momentum repulsion
  double tails = 1e-10;       // two-excitation tail residual

  bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
  Analysis analysis = Analysis::Spectrum;
  std::string model = "waveguide";  // waveguide | free_space
  std::string polarization = "transverse";
  double gamma = 1.0;
  double spacing = 1.0;
  std::vector<int> n_atoms{20};
  std::vector<double> phases{0.2};  // k d / pi
  int xi_max = 3;
  std::string branch = "both";  // edge | center | both
  std::vector<std::string> formats{"csv"};
  int jobs = 1;
  std::uint64_t seed = 12345;
  Tolerances tol;
  int fig2_states = 20;
  int fig2_window = 10;
  int random_samples = 100;
  int full_numeric_max_n = 60;
  std::string lamb_shift_form = "curvature";
  std::string gamma_source = "numeric";
  bool include_eigenvectors = false;
  std::string matrix_export = "none";    // none | json | binary
  std::string fault_injection = "none";  // none | matrix_entry
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  std::string serialize() const;  // canonical: sorted keys, fixed number format
  std::uint64_t hash() const;
  void validate() const;

  ChainConfig chain(int n, double phase_pi) const {
    if (model == "waveguide") return ChainConfig::waveguide(n, phase_pi * pi, gamma, spacing);
    const Polarization pol = polarization == "parallel" ? Polarization::Parallel : Polarization::Transverse;
    return ChainConfig::free_space(n, phase_pi * pi, pol, gamma, spacing);
  }

  std::vector<Branch> branches() const {
    if (branch == "edge") return {Branch::Edge};
    if (branch == "center") return {Branch::Center};
    return {Branch::Center, Branch::Edge};
  }

  bool wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
  }
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

inline long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + v + "'");
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

inline void expect_one_of(const std::string& key, const std::string& v,
                          std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  throw ConfigError("key '" + key + "': unsupported value '" + v + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += fmt(xs[i]);
  }
  return out;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

} // namespace detail

inline RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, val).second) throw ConfigError("duplicate key '" + key + "'");
  }

  for (const auto& [key, v] : kv) {
    using namespace detail;
    if (key == "analysis") c.analysis = parse_analysis(v);
    else if (key == "model") { expect_one_of(key, v, {"waveguide", "free_space"}); c.model = v; }
    else if (key == "polarization") { expect_one_of(key, v, {"parallel", "transverse"}); c.polarization = v; }
    else if (key == "gamma") c.gamma = to_double(key, v);
    else if (key == "spacing") c.spacing = to_double(key, v);
    else if (key == "n_atoms") {
      c.n_atoms.clear();
      for (const auto& s : split_list(v)) c.n_atoms.push_back(static_cast<int>(to_integer(key, s)));
    } else if (key == "phase") {
      c.phases.clear();
      for (const auto& s : split_list(v)) c.phases.push_back(to_double(key, s));
    } else if (key == "xi_max") c.xi_max = static_cast<int>(to_integer(key, v));
    else if (key == "branch") { expect_one_of(key, v, {"edge", "center", "both"}); c.branch = v; }
    else if (key == "formats") {
      c.formats = split_list(v);
      for (const auto& f : c.formats) expect_one_of(key, f, {"csv", "json"});
    } else if (key == "jobs") c.jobs = static_cast<int>(to_integer(key, v));
    else if (key == "seed") c.seed = to_u64(key, v);
    else if (key == "tolerance.residual") c.tol.residual = to_double(key, v);
    else if (key == "tolerance.newton") c.tol.newton = to_double(key, v);
    else if (key == "tolerance.quadrature") c.tol.quadrature = to_double(key, v);
    else if (key == "tolerance.bloch") c.tol.bloch = to_double(key, v);
    else if (key == "tolerance.identity") c.tol.identity = to_double(key, v);
    else if (key == "tolerance.tails") c.tol.tails = to_double(key, v);
    else if (key == "fig2.states") c.fig2_states = static_cast<int>(to_integer(key, v));
    else if (key == "fig2.window") c.fig2_window = static_cast<int>(to_integer(key, v));
    else if (key == "random_samples") c.random_samples = static_cast<int>(to_integer(key, v));
    else if (key == "full_numeric_max_n") c.full_numeric_max_n = static_cast<int>(to_integer(key, v));
    else if (key == "lamb_shift_form") { expect_one_of(key, v, {"curvature", "tabulated"}); c.lamb_shift_form = v; }
    else if (key == "gamma_source") { expect_one_of(key, v, {"numeric", "analytic"}); c.gamma_source = v; }
    else if (key == "include_eigenvectors") c.include_eigenvectors = to_bool(key, v);
    else if (key == "matrix_export") { expect_one_of(key, v, {"none", "json", "binary"}); c.matrix_export = v; }
    else if (key == "fault_injection") { expect_one_of(key, v, {"none", "matrix_entry"}); c.fault_injection = v; }
    else if (key == "output_dir") c.output_dir = v;
    else throw ConfigError("unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

inline RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

inline std::string RunConfig::serialize() const {
  std::map<std::string, std::string> kv;
  const auto num = [](double x) { return format_double(x); };
  kv["analysis"] = to_string(analysis);
  kv["model"] = model;
  kv["polarization"] = polarization;
  kv["gamma"] = num(gamma);
  kv["spacing"] = num(spacing);
  kv["n_atoms"] = detail::join(n_atoms, [](int n) { return std::to_string(n); });
  kv["phase"] = detail::join(phases, num);
  kv["xi_max"] = std::to_string(xi_max);
  kv["branch"] = branch;
  kv["formats"] = detail::join(formats, [](const std::string& s) { return s; });
  kv["jobs"] = std::to_string(jobs);
  kv["seed"] = std::to_string(seed);
  kv["tolerance.residual"] = num(tol.residual);
  kv["tolerance.newton"] = num(tol.newton);
  kv["tolerance.quadrature"] = num(tol.quadrature);
  kv["tolerance.bloch"] = num(tol.bloch);
  kv["tolerance.identity"] = num(tol.identity);
  kv["tolerance.tails"] = num(tol.tails);
  kv["fig2.states"] = std::to_string(fig2_states);
  kv["fig2.window"] = std::to_string(fig2_window);
  kv["random_samples"] = std::to_string(random_samples);
  kv["full_numeric_max_n"] = std::to_string(full_numeric_max_n);
  kv["lamb_shift_form"] = lamb_shift_form;
  kv["gamma_source"] = gamma_source;
  kv["include_eigenvectors"] = include_eigenvectors ? "true" : "false";
  kv["fault_injection"] = fault_injection;
  kv["matrix_export"] = matrix_export;
  kv["output_dir"] = output_dir;
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

/// FNV-1a of the canonical serialisation; independent of key order in the
/// source file. The output directory and job count do not affect results and
/// are left out.
inline std::uint64_t RunConfig::hash() const {
  RunConfig c = *this;
  c.output_dir.clear();
  c.jobs = 1;
  return detail::fnv1a(c.serialize());
}

inline void RunConfig::validate() const {
  if (n_atoms.empty()) throw ConfigError("sweep axis n_atoms is empty");
  if (phases.empty()) throw ConfigError("sweep axis phase is empty");
  for (int n : n_atoms)
    if (n < 1) throw ConfigError("n_atoms entries must be >= 1");
  for (double p : phases)
    if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("phase entries must be > 0");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be > 0");
  if (!(spacing > 0.0)) throw ConfigError("spacing must be > 0");
  if (xi_max < 1) throw ConfigError("xi_max must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  if (formats.empty()) throw ConfigError("formats is empty");
  for (const auto& f : formats) detail::expect_one_of("formats", f, {"csv", "json"});
  for (double t : {tol.residual, tol.newton, tol.quadrature, tol.bloch, tol.identity, tol.tails})
    if (!(t > 0.0)) throw ConfigError("tolerance overrides must be > 0");
  if (fig2_states < 1 || fig2_window < 1) throw ConfigError("fig2 state counts must be >= 1");
  if (random_samples < 0) throw ConfigError("random_samples must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

} // namespace subrad
