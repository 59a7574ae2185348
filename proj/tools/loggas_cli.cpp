#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "loggas/harness.hpp"
#include "loggas/io.hpp"

namespace fs = std::filesystem;
using loggas::Json;

namespace {

Json default_config() {
  auto spec = loggas::ExperimentSpec{};
  Json thresholds(spec.thresholds);
  return Json{{"version", 1},
              {"command", "clt"},
              {"potential", spec.potential},
              {"betas", spec.betas},
              {"ns", spec.ns},
              {"sampler", "tridiagonal"},
              {"replicas", spec.replicas},
              {"center", spec.center},
              {"scales", spec.scales},
              {"scale_exponents", spec.scale_exponents},
              {"s_grid", spec.s_grid},
              {"dyadic_scales", spec.dyadic_scales},
              {"omega_min", spec.omega_min},
              {"seed", spec.seed},
              {"workers", spec.workers},
              {"write_samples", false},
              {"thresholds", thresholds}};
}

struct RunConfig {
  std::string command;
  loggas::ExperimentSpec spec;
  bool write_samples = false;
};

RunConfig parse_config(const Json& doc) {
  static const std::set<std::string> known = {
      "version",     "command",   "potential",       "betas",
      "ns",          "sampler",   "replicas",        "center",
      "scales",      "scale_exponents", "s_grid",    "dyadic_scales",
      "omega_min",   "seed",      "workers",         "write_samples",
      "thresholds"};
  static const std::set<std::string> commands = {
      "sample", "energy", "transport",     "clt",
      "uniform", "audit", "local-law", "cache-inspect"};
  if (!doc.is_object()) throw loggas::InvalidArgument("config: not a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!known.count(key))
      throw loggas::InvalidArgument("config: unknown key '" + key + "'");
  if (!doc.contains("version") || doc["version"] != 1)
    throw loggas::InvalidArgument("version: missing or unsupported");
  RunConfig rc;
  auto get = [&doc](const char* key, auto&& into) {
    if (!doc.contains(key)) return;
    try {
      doc.at(key).get_to(into);
    } catch (const Json::exception&) {
      throw loggas::InvalidArgument(std::string(key) + ": wrong type");
    }
  };
  get("command", rc.command);
  if (!commands.count(rc.command))
    throw loggas::InvalidArgument("command: unknown '" + rc.command + "'");
  get("potential", rc.spec.potential);
  get("betas", rc.spec.betas);
  get("ns", rc.spec.ns);
  std::string sampler = "tridiagonal";
  get("sampler", sampler);
  if (sampler == "tridiagonal")
    rc.spec.sampler = loggas::SamplerKind::tridiagonal;
  else if (sampler == "mcmc")
    rc.spec.sampler = loggas::SamplerKind::mcmc;
  else
    throw loggas::InvalidArgument("sampler: unknown '" + sampler + "'");
  get("replicas", rc.spec.replicas);
  get("center", rc.spec.center);
  get("scales", rc.spec.scales);
  get("scale_exponents", rc.spec.scale_exponents);
  get("s_grid", rc.spec.s_grid);
  get("dyadic_scales", rc.spec.dyadic_scales);
  get("omega_min", rc.spec.omega_min);
  get("seed", rc.spec.seed);
  get("workers", rc.spec.workers);
  get("write_samples", rc.write_samples);
  if (doc.contains("thresholds")) {
    if (!doc["thresholds"].is_object())
      throw loggas::InvalidArgument("thresholds: wrong type");
    for (const auto& [key, value] : doc["thresholds"].items()) {
      if (!rc.spec.thresholds.count(key))
        throw loggas::InvalidArgument("thresholds: unknown key '" + key + "'");
      if (!value.is_number())
        throw loggas::InvalidArgument("thresholds." + key + ": wrong type");
      rc.spec.thresholds[key] = value.get<double>();
    }
  }
  rc.spec.experiment = rc.command;
  rc.spec.validate();
  return rc;
}

void print_table(const loggas::CsvTable& table, std::size_t max_rows = 20) {
  std::istringstream in(table.str());
  std::string line;
  std::size_t shown = 0;
  while (std::getline(in, line) && shown <= max_rows) {
    for (auto& c : line)
      if (c == ',') c = '\t';
    std::cout << line << "\n";
    ++shown;
  }
  if (table.row_count() + 1 > shown) std::cout << "... (truncated)\n";
}

// solves cached per (potential, grid size); documents written once
loggas::EquilibriumMeasure cached_equilibrium(const loggas::Potential& pot,
                                              const loggas::DiskCache& cache) {
  auto eq = loggas::solve_equilibrium(pot, 1024);
  auto key = loggas::equilibrium_cache_key(pot.label(), 1024, "analytic-one-cut");
  if (!cache.get(key)) cache.put(key, loggas::to_json(eq));
  return eq;
}

int run_sample(const RunConfig& rc, const fs::path& out,
               const loggas::DiskCache& cache) {
  auto pot = rc.spec.make_potential();
  auto eq = cached_equilibrium(pot, cache);
  loggas::CsvTable report({"beta", "n", "replica", "seed", "min", "max",
                           "mean", "acceptance_rate"});
  for (std::size_t bi = 0; bi < rc.spec.betas.size(); ++bi)
    for (std::size_t ni = 0; ni < rc.spec.ns.size(); ++ni) {
      loggas::ReplicaSpec rs;
      rs.kind = rc.spec.sampler;
      rs.n = rc.spec.ns[ni];
      rs.beta = rc.spec.betas[bi];
      rs.seed = loggas::derive_seed(rc.spec.seed, 0x10000ULL * (bi + 1) + ni);
      rs.potential = &pot;
      rs.eq = &eq;
      auto cfgs = loggas::sample_replicas(rs, rc.spec.replicas, rc.spec.workers);
      for (std::size_t k = 0; k < cfgs.size(); ++k) {
        const auto& c = cfgs[k];
        auto m = loggas::compute_moments(c.points);
        report.add_row({loggas::format_number(c.beta), std::to_string(c.n),
                        std::to_string(k), std::to_string(c.provenance.seed),
                        loggas::format_number(c.points.front()),
                        loggas::format_number(c.points.back()),
                        loggas::format_number(m.mean),
                        loggas::format_number(c.provenance.acceptance_rate)});
        if (rc.write_samples) {
          loggas::CsvTable pts({"index", "x"});
          for (std::size_t i = 0; i < c.points.size(); ++i)
            pts.add_row({std::to_string(i), loggas::format_number(c.points[i])});
          char name[64];
          std::snprintf(name, sizeof(name), "beta%zu-n%zu-replica%04zu.csv",
                        bi, ni, k);
          pts.write(out / "samples" / name);
        }
      }
    }
  report.write(out / "report.csv");
  Json summary{{"experiment", "sample"},
               {"seed", rc.spec.seed},
               {"replicas", rc.spec.replicas},
               {"rows", report.row_count()}};
  loggas::write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  print_table(report);
  return 0;
}

int run_energy(const RunConfig& rc, const fs::path& out,
               const loggas::DiskCache& cache) {
  auto pot = rc.spec.make_potential();
  auto eq = cached_equilibrium(pot, cache);
  loggas::CsvTable report(
      {"beta", "n", "replica", "next_order_energy", "splitting_residual"});
  Json quantiles = Json::array();
  for (std::size_t bi = 0; bi < rc.spec.betas.size(); ++bi)
    for (std::size_t ni = 0; ni < rc.spec.ns.size(); ++ni) {
      loggas::ReplicaSpec rs;
      rs.kind = rc.spec.sampler;
      rs.n = rc.spec.ns[ni];
      rs.beta = rc.spec.betas[bi];
      rs.seed = loggas::derive_seed(rc.spec.seed, 0x10000ULL * (bi + 1) + ni);
      rs.potential = &pot;
      rs.eq = &eq;
      auto cfgs = loggas::sample_replicas(rs, rc.spec.replicas, rc.spec.workers);
      auto vals = loggas::parallel_map<std::pair<double, double>>(
          cfgs.size(), rc.spec.workers, [&](std::size_t k) {
            return std::make_pair(
                loggas::next_order_energy_unblown(cfgs[k], eq),
                loggas::splitting_check(cfgs[k], pot, eq));
          });
      std::vector<double> fs;
      for (std::size_t k = 0; k < vals.size(); ++k) {
        fs.push_back(vals[k].first);
        report.add_row({loggas::format_number(rs.beta), std::to_string(rs.n),
                        std::to_string(k), loggas::format_number(vals[k].first),
                        loggas::format_number(vals[k].second)});
      }
      quantiles.push_back(Json{{"beta", rs.beta},
                               {"n", rs.n},
                               {"median", loggas::quantile(fs, 0.5)},
                               {"p99", loggas::quantile(fs, 0.99)}});
    }
  report.write(out / "report.csv");
  Json summary{{"experiment", "energy"},
               {"seed", rc.spec.seed},
               {"quantiles", quantiles}};
  loggas::write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  print_table(report);
  return 0;
}

int run_transport(const RunConfig& rc, const fs::path& out,
                  const loggas::DiskCache& cache) {
  auto pot = rc.spec.make_potential();
  auto eq = cached_equilibrium(pot, cache);
  loggas::CsvTable report({"scale", "c_xi", "residual", "sup_psi_inside"});
  for (double l : rc.spec.scales) {
    auto xi = loggas::TestFunction::rescaled_bump(rc.spec.center, l);
    auto key = loggas::transport_cache_key(pot.label(), xi.label, 1024);
    Json doc;
    if (auto hit = cache.get(key)) {
      doc = *hit;
    } else {
      auto map = loggas::solve_transport(xi, eq, pot);
      doc = loggas::to_json(map);
      cache.put(key, doc);
    }
    double sup = 0.0;
    for (const auto& v : doc["values_inside"])
      sup = std::max(sup, std::abs(v.get<double>()));
    report.add_row({loggas::format_number(l),
                    loggas::format_number(doc["c_xi"].get<double>()),
                    loggas::format_number(doc["residual"].get<double>()),
                    loggas::format_number(sup)});
    loggas::write_text_atomic(
        out / ("transport-" + loggas::DiskCache::filename(key)),
        doc.dump(2) + "\n");
  }
  report.write(out / "report.csv");
  Json summary{{"experiment", "transport"}, {"rows", report.row_count()}};
  loggas::write_text_atomic(out / "summary.json", summary.dump(2) + "\n");
  print_table(report);
  return 0;
}

int run_cache_inspect(const loggas::DiskCache& cache) {
  auto entries = cache.list();
  std::cout << "cache: " << cache.dir().string() << " (" << entries.size()
            << " entries)\n";
  for (const auto& e : entries) {
    if (e.ok)
      std::cout << "  " << e.key << "  residual=" << e.residual << "  ["
                << e.file << "]\n";
    else
      std::cout << "  CORRUPTED  [" << e.file << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"log-gas numerical laboratory"};
  std::string config_path, command_override;
  std::string out_dir = "out", cache_dir = "cache";
  std::uint64_t seed_override = 0;
  bool have_seed = false, print_default = false;
  std::size_t workers_override = 0;
  app.add_option("command", command_override,
                 "command override (else taken from the config)");
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed_override, "seed override")
      ->each([&](const std::string&) { have_seed = true; });
  app.add_option("--workers", workers_override, "worker thread override");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--cache", cache_dir, "cache directory");
  app.add_flag("--print-default-config", print_default,
               "print the default config and exit");
  CLI11_PARSE(app, argc, argv);

  if (print_default) {
    std::cout << default_config().dump(2) << "\n";
    return 0;
  }

  try {
    loggas::DiskCache cache{cache_dir};
    if (command_override == "cache-inspect" && config_path.empty())
      return run_cache_inspect(cache);

    if (config_path.empty()) {
      std::cerr << "config: --config is required\n";
      return 2;
    }
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
      std::cerr << "config: cannot open " << config_path << "\n";
      return 2;
    }
    Json doc = Json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      std::cerr << "config: invalid JSON in " << config_path << "\n";
      return 2;
    }
    if (!command_override.empty()) doc["command"] = command_override;
    RunConfig rc = parse_config(doc);
    if (have_seed) rc.spec.seed = seed_override;
    if (workers_override) rc.spec.workers = workers_override;
    rc.spec.validate();

    fs::path out{out_dir};
    fs::create_directories(out);
    if (rc.command == "cache-inspect") return run_cache_inspect(cache);
    if (rc.command == "sample") return run_sample(rc, out, cache);
    if (rc.command == "energy") return run_energy(rc, out, cache);
    if (rc.command == "transport") return run_transport(rc, out, cache);

    // the experiment re-solves internally; the cache holds the documents
    {
      auto pot = rc.spec.make_potential();
      auto eq = cached_equilibrium(pot, cache);
      if (rc.command == "clt" || rc.command == "uniform")
        for (double l : rc.spec.scales) {
          auto xi = loggas::TestFunction::rescaled_bump(rc.spec.center, l);
          auto key = loggas::transport_cache_key(pot.label(), xi.label, 1024);
          if (!cache.get(key))
            cache.put(key, loggas::to_json(loggas::solve_transport(xi, eq, pot)));
        }
    }
    auto rep = [&]() -> loggas::ExperimentReport {
      if (rc.command == "clt") return loggas::clt_experiment(rc.spec);
      if (rc.command == "local-law") return loggas::local_law_experiment(rc.spec);
      if (rc.command == "uniform") return loggas::uniform_fluct_experiment(rc.spec);
      return loggas::inequality_audit(rc.spec);
    }();
    rep.write(out);
    print_table(rep.table);
    std::cout << (rep.passed ? "PASS" : "FAIL") << " (" << rc.command << ")\n";
    if (rc.command == "audit" && !rep.passed) return 4;
    return 0;
  } catch (const loggas::InvalidArgument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
