#pragma once

// Result tables (CSV with a schema header, JSON mirror), run manifest,
// matrix dumps and the bounded sweep worker pool.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "subrad/config.hpp"
#include "subrad/spectral.hpp"

namespace subrad {

inline constexpr const char* tool_version = SUBRAD_VERSION;
inline constexpr int csv_schema = 1;

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  Table& add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw Error("table '" + name + "': row width mismatch");
    rows.push_back(std::move(row));
    return *this;
  }
};

inline Cell cell(int v) { return static_cast<long long>(v); }
inline Cell cell(double v) { return v; }
inline Cell cell(std::string v) { return v; }
inline Cell cell(const char* v) { return std::string(v); }

namespace detail {

inline std::string csv_field(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

inline std::string json_field(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return std::isfinite(*d) ? format_double(*d) : "null";
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return nlohmann::json(std::get<std::string>(c)).dump();
}

} // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out = "# schema=" + std::to_string(csv_schema) + "\n";
  for (std::size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + t.columns[j];
  out += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + detail::csv_field(row[j]);
    out += "\n";
  }
  return out;
}

/// JSON mirror of the CSV: same columns, numbers with 17 significant digits.
inline std::string to_json(const Table& t) {
  std::string out = "{\"schema\":" + std::to_string(csv_schema) + ",\"name\":" + nlohmann::json(t.name).dump() +
                    ",\"columns\":" + nlohmann::json(t.columns).dump() + ",\"rows\":[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out += r ? ",{" : "{";
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      if (j) out += ",";
      out += nlohmann::json(t.columns[j]).dump() + ":" + detail::json_field(t.rows[r][j]);
    }
    out += "}";
  }
  return out + "]}\n";
}

struct PointRecord {
  std::string id;
  std::string status = "ok";  // ok | failed
  std::string error;
  double wall_seconds = 0.0;
};

/// Writes tables under one output directory and tracks every file produced.
class RunWriter {
public:
  RunWriter(std::filesystem::path dir, const RunConfig& cfg) : dir_(std::move(dir)), cfg_(cfg) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_))
      throw ConfigError("output directory '" + dir_.string() + "' is not writable");
    const auto probe = dir_ / ".subrad_probe";
    {
      std::ofstream p(probe);
      if (!p) throw ConfigError("output directory '" + dir_.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const Table& t) {
    if (cfg_.wants("csv")) write_text(t.name + ".csv", to_csv(t));
    if (cfg_.wants("json")) write_text(t.name + ".json", to_json(t));
  }

  void write_text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    files_.push_back(name);
  }

  void write_binary(const std::string& name, const std::vector<char>& bytes) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir_ / name).string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    files_.push_back(name);
  }

  void record(PointRecord p) { points_.push_back(std::move(p)); }
  const std::vector<PointRecord>& points() const { return points_; }
  const std::vector<std::string>& files() const { return files_; }
  bool any_failed() const {
    for (const auto& p : points_)
      if (p.status != "ok") return true;
    return false;
  }

  /// manifest.json: config hash, tool version, per-point status, wall times,
  /// file inventory. Written last; lists itself.
  void write_manifest(const std::string& command, double total_seconds,
                      const nlohmann::json& extra = nlohmann::json::object()) {
    nlohmann::json m;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cfg_.hash()));
    m["command"] = command;
    m["config_hash"] = hash;
    m["tool_version"] = tool_version;
    m["config"] = cfg_.serialize();
    m["wall_seconds"] = total_seconds;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points_) {
      nlohmann::json j{{"id", p.id}, {"status", p.status}, {"wall_seconds", p.wall_seconds}};
      if (!p.error.empty()) j["error"] = p.error;
      pts.push_back(j);
    }
    m["points"] = pts;
    std::vector<std::string> inventory = files_;
    inventory.push_back("manifest.json");
    m["files"] = inventory;
    for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
    std::ofstream out(dir_ / "manifest.json");
    out << m.dump(2) << "\n";
  }

private:
  std::filesystem::path dir_;
  RunConfig cfg_;
  std::vector<std::string> files_;
  std::vector<PointRecord> points_;
};

template <class R>
struct PointResult {
  std::optional<R> value;
  std::string error;
  double wall_seconds = 0.0;
};

/// Run fn over items on at most `jobs` threads; results come back in input order.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, int jobs, F fn)
    -> std::vector<PointResult<std::invoke_result_t<F, const T&>>> {
  using R = std::invoke_result_t<F, const T&>;
  std::vector<PointResult<R>> out(items.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const auto t0 = std::chrono::steady_clock::now();
      try {
        out[i].value.emplace(fn(items[i]));
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
      out[i].wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();  // join before handing the results out
  return out;
}

// ---- matrix and spectrum export -----------------------------------------------

inline nlohmann::json index_map_json(const SectorBasis& b) {
  nlohmann::json map = nlohmann::json::array();
  for (int i = 0; i < b.dimension(); ++i) {
    const auto [m, n] = b.sites(i);
    map.push_back(b.sector() == Sector::OneExcitation ? nlohmann::json{m} : nlohmann::json{m, n});
  }
  return map;
}

/// JSON dump: basis header plus row-major (re, im) pairs.
inline std::string matrix_to_json(const SectorMatrix& h) {
  std::string out = "{\"sector\":\"";
  out += h.basis.sector() == Sector::OneExcitation ? "one" : "two";
  out += "\",\"part\":\"" + std::string(to_string(h.part)) + "\",\"dimension\":" +
         std::to_string(h.dimension()) + ",\"index_map\":" + index_map_json(h.basis).dump() + ",\"entries\":[";
  for (int i = 0; i < h.dimension(); ++i)
    for (int j = 0; j < h.dimension(); ++j) {
      if (i || j) out += ",";
      out += "[" + format_double(h.entries(i, j).real()) + "," + format_double(h.entries(i, j).imag()) + "]";
    }
  return out + "]}\n";
}

/// Binary dump: "SUBRADM1", u32 sector, u32 part, u32 dim, dim pairs of i32
/// site indices, then row-major little-endian f64 (re, im).
inline std::vector<char> matrix_to_binary(const SectorMatrix& h) {
  std::vector<char> out;
  const auto put = [&](const void* p, std::size_t n) {
    const char* c = static_cast<const char*>(p);
    out.insert(out.end(), c, c + n);
  };
  put("SUBRADM1", 8);
  const std::uint32_t sector = h.basis.sector() == Sector::OneExcitation ? 1 : 2;
  const std::uint32_t part = static_cast<std::uint32_t>(h.part);
  const std::uint32_t dim = static_cast<std::uint32_t>(h.dimension());
  put(&sector, 4);
  put(&part, 4);
  put(&dim, 4);
  for (int i = 0; i < h.dimension(); ++i) {
    const auto [m, n] = h.basis.sites(i);
    const std::int32_t a = m, b = n;
    put(&a, 4);
    put(&b, 4);
  }
  for (int i = 0; i < h.dimension(); ++i)
    for (int j = 0; j < h.dimension(); ++j) {
      const double re = h.entries(i, j).real(), im = h.entries(i, j).imag();
      put(&re, 8);
      put(&im, 8);
    }
  return out;
}

inline SectorMatrix matrix_from_binary(const std::vector<char>& bytes) {
  std::size_t pos = 0;
  const auto get = [&](void* p, std::size_t n) {
    if (pos + n > bytes.size()) throw Error("truncated matrix dump");
    std::memcpy(p, bytes.data() + pos, n);
    pos += n;
  };
  char magic[8];
  get(magic, 8);
  if (std::string(magic, 8) != "SUBRADM1") throw Error("not a matrix dump");
  std::uint32_t sector = 0, part = 0, dim = 0;
  get(&sector, 4);
  get(&part, 4);
  get(&dim, 4);
  int n_sites = 0;
  for (std::uint32_t i = 0; i < dim; ++i) {
    std::int32_t a = 0, b = 0;
    get(&a, 4);
    get(&b, 4);
    n_sites = std::max({n_sites, a + 1, b + 1});
  }
  SectorMatrix h{sector == 1 ? SectorBasis::one(n_sites) : SectorBasis::two(n_sites),
                 static_cast<MatrixPart>(part), CMatrix(dim, dim)};
  if (h.basis.dimension() != static_cast<int>(dim)) throw Error("inconsistent matrix dump header");
  for (std::uint32_t i = 0; i < dim; ++i)
    for (std::uint32_t j = 0; j < dim; ++j) {
      double re = 0, im = 0;
      get(&re, 8);
      get(&im, 8);
      h.entries(i, j) = cplx(re, im);
    }
  return h;
}

/// Spectrum summary; eigenvectors only when asked for.
inline nlohmann::json spectrum_json(const SpectralResult& res, const std::vector<ModeLabel>& labels,
                                    bool with_vectors) {
  nlohmann::json j;
  nlohmann::json ev = nlohmann::json::array(), gam = nlohmann::json::array(), lab = nlohmann::json::array();
  for (int i = 0; i < res.size(); ++i) {
    ev.push_back({res.eigenvalues[static_cast<std::size_t>(i)].real(), res.eigenvalues[static_cast<std::size_t>(i)].imag()});
    gam.push_back(res.decay_rates[static_cast<std::size_t>(i)]);
  }
  for (const auto& l : labels)
    lab.push_back({{"mode", l.mode}, {"kind", to_string(l.kind)}, {"branch", to_string(l.branch)},
                   {"xi", l.xi}, {"dominant_k", l.dominant_k}});
  j["eigenvalues"] = ev;
  j["gamma"] = gam;
  j["labels"] = lab;
  j["max_residual"] = res.max_residual();
  if (with_vectors) {
    nlohmann::json vecs = nlohmann::json::array();
    for (int c = 0; c < res.eigenvectors.cols(); ++c) {
      nlohmann::json v = nlohmann::json::array();
      for (int r = 0; r < res.eigenvectors.rows(); ++r)
        v.push_back({res.eigenvectors(r, c).real(), res.eigenvectors(r, c).imag()});
      vecs.push_back(v);
    }
    j["eigenvectors"] = vecs;
  }
  return j;
}

} // namespace subrad
