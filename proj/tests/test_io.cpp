#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "loggas/io.hpp"

using namespace loggas;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("loggas-io-" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("atomic text write", "[io]") {
  auto dir = fresh_dir("atomic");
  auto path = dir / "sub" / "a.txt";
  write_text_atomic(path, "hello\n");
  CHECK(slurp(path) == "hello\n");
  // overwrite goes through the same path
  write_text_atomic(path, "bye\n");
  CHECK(slurp(path) == "bye\n");
  // no temporary left behind
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(path.parent_path())) {
    (void)e;
    ++count;
  }
  CHECK(count == 1);
}

TEST_CASE("csv formatting", "[io]") {
  CsvTable t({"a", "b"});
  t.add_row({"1", format_number(0.5)});
  t.add_row({format_number(1e-12), "x"});
  std::string s = t.str();
  CHECK(s == "a,b\n1,0.5\n1e-12,x\n");
  CHECK(s.find('\r') == std::string::npos);
  CHECK_THROWS_AS(t.add_row({"only-one"}), InvalidArgument);
  CHECK_THROWS_AS(CsvTable({}), InvalidArgument);

  auto dir = fresh_dir("csv");
  t.write(dir / "t.csv");
  CHECK(slurp(dir / "t.csv") == s);
}

TEST_CASE("configuration json round trip", "[io]") {
  auto cfg = sample_tridiagonal(16, 2.0, 42);
  auto j = to_json(cfg);
  auto back = configuration_from_json(j);
  REQUIRE(back.points.size() == cfg.points.size());
  for (std::size_t i = 0; i < cfg.points.size(); ++i)
    CHECK(back.points[i] == cfg.points[i]);
  CHECK(back.beta == cfg.beta);
  CHECK(back.provenance.seed == cfg.provenance.seed);
  CHECK(back.provenance.sampler_id == cfg.provenance.sampler_id);
}

TEST_CASE("solution documents", "[io]") {
  auto pot = Potential::quadratic();
  auto eq = solve_equilibrium(pot, 512);
  auto jeq = to_json(eq);
  CHECK(jeq["label"] == pot.label());
  CHECK(jeq["support"].size() == 1);
  CHECK(std::abs(jeq["density"][256].get<double>() - 2.0 / kPi) < 1e-6);

  auto map = solve_transport(TestFunction::polynomial({0.0, 1.0}), eq, pot);
  auto jtm = to_json(map);
  CHECK(jtm["c_xi"].get<double>() == Catch::Approx(0.0).margin(1e-8));
  CHECK(jtm["residual"].get<double>() < 1e-4);
  for (const auto& v : jtm["values_inside"])
    CHECK(std::abs(v.get<double>() + 0.5) < 1e-6);
}

TEST_CASE("disk cache", "[io]") {
  auto dir = fresh_dir("cache");
  DiskCache cache(dir);
  CHECK(cache.list().empty());
  CHECK_FALSE(cache.get("absent").has_value());

  std::string key = transport_cache_key("V=x^2", "bump(z=0,L=0.1)", 512);
  cache.put(key, Json{{"residual", 3e-6}, {"c_xi", 0.0}});
  auto hit = cache.get(key);
  REQUIRE(hit.has_value());
  CHECK((*hit)["residual"].get<double>() == 3e-6);

  // distinct keys, distinct files
  std::string key2 = equilibrium_cache_key("V=x^2", 512, "analytic-one-cut");
  cache.put(key2, Json{{"c_v", 1.1931}});
  auto entries = cache.list();
  REQUIRE(entries.size() == 2);
  int ok = 0;
  for (const auto& e : entries) ok += e.ok ? 1 : 0;
  CHECK(ok == 2);

  // corrupted entry: flagged in the listing, behaves like a miss on get
  write_text_atomic(dir / DiskCache::filename(key2), "{not json");
  CHECK_FALSE(cache.get(key2).has_value());
  entries = cache.list();
  REQUIRE(entries.size() == 2);
  int bad = 0;
  for (const auto& e : entries) bad += e.ok ? 0 : 1;
  CHECK(bad == 1);
  CHECK(cache.get(key).has_value());
}
