#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "loggas/electrostatics.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/errors.hpp"
#include "loggas/sampler.hpp"
#include "loggas/transport.hpp"

namespace loggas {

using Json = nlohmann::json;

// All artifact writes go through write-then-rename so readers never observe
// a partially written file.
inline void write_text_atomic(const std::filesystem::path& path,
                              const std::string& text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InvalidArgument("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Deterministic numeric formatting for reports: same bytes for same doubles.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// In-memory CSV with LF line endings and a mandatory header row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header)
      : header_(std::move(header)) {
    if (header_.empty()) throw InvalidArgument("csv header must be non-empty");
  }

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size())
      throw InvalidArgument("csv row width " + std::to_string(row.size()) +
                            " != header width " + std::to_string(header_.size()));
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t row_count() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    emit(header_);
    for (const auto& r : rows_) emit(r);
    return out;
  }

  void write(const std::filesystem::path& path) const {
    write_text_atomic(path, str());
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline Json to_json(const Configuration& config) {
  return Json{{"points", config.points},
              {"n", config.n},
              {"beta", config.beta},
              {"provenance",
               {{"sampler", config.provenance.sampler_id},
                {"seed", config.provenance.seed},
                {"steps", config.provenance.steps},
                {"acceptance_rate", config.provenance.acceptance_rate}}}};
}

inline Configuration configuration_from_json(const Json& j) {
  Configuration cfg;
  cfg.points = j.at("points").get<std::vector<double>>();
  cfg.beta = j.at("beta").get<double>();
  const auto& p = j.at("provenance");
  cfg.provenance.sampler_id = p.at("sampler").get<std::string>();
  cfg.provenance.seed = p.at("seed").get<std::uint64_t>();
  cfg.provenance.steps = p.at("steps").get<std::uint64_t>();
  cfg.provenance.acceptance_rate = p.at("acceptance_rate").get<double>();
  cfg.finalize();
  return cfg;
}

inline Json to_json(const EnergyBreakdown& e) {
  return Json{{"pair_sum", e.pair_sum},
              {"cross_term", e.cross_term},
              {"background_term", e.background_term},
              {"field_integral", e.field_integral},
              {"self_energy_sum", e.self_energy_sum},
              {"f_correction", e.f_correction},
              {"tail_estimate", e.tail_estimate},
              {"points_in_window", e.points_in_window},
              {"total", e.total}};
}

inline Json to_json(const EquilibriumMeasure& eq) {
  Json support = Json::array();
  for (const auto& iv : eq.support()) support.push_back({iv.a, iv.b});
  // uniform sample of the density so the document is plot-ready regardless
  // of the internal representation
  const int k = 512;
  std::vector<double> grid(k + 1), density(k + 1);
  double a = eq.support_lo(), b = eq.support_hi();
  for (int i = 0; i <= k; ++i) {
    grid[i] = a + (b - a) * i / k;
    density[i] = eq.density(grid[i]);
  }
  Json j{{"label", eq.label()},  {"c_v", eq.c_v()},
         {"support", support},   {"grid", grid},
         {"density", density},   {"analytic", eq.analytic()},
         {"mass_tolerance", 1e-8}};
  if (eq.analytic()) {
    j["center"] = eq.center();
    j["half_width"] = eq.half_width();
    j["u_coeffs"] = eq.u_coeffs();
  }
  return j;
}

inline Json to_json(const TransportMap& map) {
  const int k = 256;
  std::vector<double> grid_in(k + 1), vals_in(k + 1);
  double a = map.support_lo(), b = map.support_hi();
  for (int i = 0; i <= k; ++i) {
    grid_in[i] = a + (b - a) * i / k;
    vals_in[i] = map.psi(grid_in[i]);
  }
  std::vector<double> grid_out, vals_out;
  for (int i = 0; i <= k; ++i) {
    double x = map.box_lo() + (map.box_hi() - map.box_lo()) * i / k;
    if (x > a && x < b) continue;
    grid_out.push_back(x);
    vals_out.push_back(map.psi(x));
  }
  return Json{{"source", map.source().label},
              {"potential", map.potential().label()},
              {"c_xi", map.c_xi()},
              {"residual", map.residual()},
              {"grid_inside", grid_in},
              {"values_inside", vals_in},
              {"grid_outside", grid_out},
              {"values_outside", vals_out},
              {"inside_coeffs", map.inside_coeffs()}};
}

inline std::string equilibrium_cache_key(const std::string& potential_label,
                                         int grid_size,
                                         const std::string& method) {
  return "eq|" + potential_label + "|" + std::to_string(grid_size) + "|" + method;
}

inline std::string transport_cache_key(const std::string& potential_label,
                                       const std::string& xi_label,
                                       int grid_size) {
  return "tm|" + potential_label + "|" + xi_label + "|" +
         std::to_string(grid_size);
}

struct CacheEntry {
  std::string key;
  std::string file;
  bool ok = false;
  double residual = 0.0;  // transport entries only; 0 otherwise
};

// One JSON file per key; filenames are a hash plus a readable slug. Writes
// are atomic and entries are never mutated in place.
class DiskCache {
 public:
  explicit DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  void put(const std::string& key, const Json& doc) const {
    Json wrapped{{"key", key}, {"doc", doc}};
    write_text_atomic(dir_ / filename(key), wrapped.dump(2) + "\n");
  }

  std::optional<Json> get(const std::string& key) const {
    std::ifstream in(dir_ / filename(key), std::ios::binary);
    if (!in) return std::nullopt;
    Json wrapped = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (wrapped.is_discarded() || !wrapped.contains("key") ||
        wrapped["key"] != key || !wrapped.contains("doc"))
      return std::nullopt;  // corrupted entries behave like misses
    return wrapped["doc"];
  }

  std::vector<CacheEntry> list() const {
    std::vector<CacheEntry> out;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir_))
      if (e.is_regular_file() && e.path().extension() == ".json")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      CacheEntry entry;
      entry.file = f.filename().string();
      std::ifstream in(f, std::ios::binary);
      Json wrapped = Json::parse(in, nullptr, false);
      if (!wrapped.is_discarded() && wrapped.contains("key") &&
          wrapped.contains("doc")) {
        entry.ok = true;
        entry.key = wrapped["key"].get<std::string>();
        const auto& doc = wrapped["doc"];
        if (doc.contains("residual")) entry.residual = doc["residual"].get<double>();
      }
      out.push_back(std::move(entry));
    }
    return out;
  }

  static std::string filename(const std::string& key) {
    // fnv-1a, plus a sanitized prefix of the key for human readability
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : key) h = (h ^ c) * 0x100000001b3ULL;
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(h));
    std::string slug;
    for (char c : key) {
      if (slug.size() >= 40) break;
      slug += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
               c == '.')
                  ? c
                  : '_';
    }
    return slug + "-" + hex + ".json";
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace loggas
