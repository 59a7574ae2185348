#include <catch2/catch_amalgamated.hpp>

#include "loggas/harness.hpp"

using namespace loggas;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.experiment = "clt";
  spec.betas = {2.0};
  spec.ns = {64};
  spec.replicas = 60;
  spec.scales = {0.4};
  spec.seed = 11;
  spec.workers = 1;
  return spec;
}

}  // namespace

TEST_CASE("experiment spec validation", "[harness]") {
  auto spec = small_spec();
  CHECK_NOTHROW(spec.validate());

  auto bad = spec;
  bad.betas = {-1.0};
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("betas"));

  bad = spec;
  bad.scales = {0.05};  // L*N = 3.2 <= omega_min
  CHECK_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("scales"));

  bad = spec;
  bad.potential = "sextic";
  CHECK_THROWS_WITH(bad.validate(),
                    Catch::Matchers::ContainsSubstring("potential"));

  bad = spec;
  bad.replicas = 1;
  CHECK_THROWS_WITH(bad.validate(),
                    Catch::Matchers::ContainsSubstring("replicas"));

  bad = spec;
  bad.dyadic_scales = {4.0};
  CHECK_THROWS_WITH(bad.validate(),
                    Catch::Matchers::ContainsSubstring("dyadic"));

  CHECK_THROWS_AS(spec.threshold("nonsense"), InvalidArgument);
}

TEST_CASE("clt experiment smoke and determinism", "[harness]") {
  auto spec = small_spec();
  auto rep = clt_experiment(spec);
  CHECK(rep.experiment == "clt");
  CHECK(rep.table.row_count() == 1);

  // worker count must not affect a single byte of the report
  auto spec3 = spec;
  spec3.workers = 3;
  auto rep3 = clt_experiment(spec3);
  CHECK(rep.table.str() == rep3.table.str());
  CHECK(rep.summary.dump() == rep3.summary.dump());

  // different seed, different samples
  auto spec2 = spec;
  spec2.seed = 12;
  auto rep2 = clt_experiment(spec2);
  CHECK(rep.table.str() != rep2.table.str());
}

TEST_CASE("clt experiment statistics are sane", "[harness]") {
  auto spec = small_spec();
  spec.ns = {256};
  spec.replicas = 400;
  auto rep = clt_experiment(spec);
  // parse the lone data row through the summary-independent csv text
  std::string csv = rep.table.str();
  auto second_line = csv.substr(csv.find('\n') + 1);
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (pos <= second_line.size()) {
    auto c = second_line.find_first_of(",\n", pos);
    cells.push_back(second_line.substr(pos, c - pos));
    if (c == std::string::npos || second_line[c] == '\n') break;
    pos = c + 1;
  }
  double variance = std::stod(cells[5]);
  double pred_var = std::stod(cells[11]);
  double pred_mean = std::stod(cells[12]);
  CHECK(pred_var > 0.0);
  CHECK(variance / pred_var > 0.6);
  CHECK(variance / pred_var < 1.6);
  CHECK(pred_mean == 0.0);  // beta = 2: the mean shift prefactor vanishes
}

TEST_CASE("uniform experiment envelope", "[harness]") {
  auto spec = small_spec();
  spec.experiment = "uniform";
  spec.replicas = 80;
  spec.s_grid = {-1.0, -0.5, 0.0, 0.5, 1.0};
  spec.dyadic_scales = {16.0};
  auto rep = uniform_fluct_experiment(spec);
  // rows: 1 bump + zeta + kappa, 5 s values each
  CHECK(rep.table.row_count() == 15);
  // s = 0 rows are exactly zero, and the fitted envelope covers every gap
  std::string csv = rep.table.str();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (;;) {
      auto c = line.find(',', pos);
      cells.push_back(line.substr(pos, c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    double s = std::stod(cells[4]);
    double emp = std::stod(cells[5]);
    double gap = std::stod(cells[7]);
    double env = std::stod(cells[8]);
    if (s == 0.0) {
      CHECK(emp == 0.0);
      CHECK(gap == 0.0);
    } else {
      CHECK(env >= gap - 1e-12);
    }
  }
  // curvature at zero tracks the sample variance
  for (const auto& fit : rep.summary["fits"]) {
    double curv = fit["curvature_at_0"].get<double>();
    double var = fit["sample_variance"].get<double>();
    CHECK(std::abs(curv - var) < 0.5 * var + 1e-6);
  }
  CHECK_THROWS_WITH(uniform_fluct_experiment(small_spec()),
                    Catch::Matchers::ContainsSubstring("s_grid"));
}

TEST_CASE("local law experiment smoke", "[harness]") {
  auto spec = small_spec();
  spec.experiment = "local-law";
  spec.replicas = 20;
  spec.dyadic_scales = {8.0, 16.0, 32.0};
  auto rep = local_law_experiment(spec);
  CHECK(rep.table.row_count() == 3);
  for (const auto& s : rep.summary["slopes"]) {
    CHECK(s["c0_emp"].get<double>() >= 0.0);
    CHECK(std::isfinite(s["p99_slope"].get<double>()));
  }

  // a window centered outside the bulk is refused
  auto bad = spec;
  bad.center = 0.99;
  CHECK_THROWS_AS(local_law_experiment(bad), WindowOutsideBulk);
}

TEST_CASE("inequality audit smoke", "[harness]") {
  auto spec = small_spec();
  spec.experiment = "audit";
  spec.replicas = 20;
  spec.dyadic_scales = {8.0, 16.0};
  auto rep = inequality_audit(spec);
  CHECK(rep.table.row_count() >= 8);
  std::string csv = rep.table.str();
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  bool saw_energy = false, saw_rough = false, saw_moment = false;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    for (;;) {
      auto c = line.find(',', pos);
      cells.push_back(line.substr(pos, c - pos));
      if (c == std::string::npos) break;
      pos = c + 1;
    }
    double mx = std::stod(cells[5]);
    CHECK(std::isfinite(mx));
    if (cells[2] == "energy-estimate") {
      saw_energy = true;
      CHECK(mx < 10.0);  // the lemma's constant is order one
    }
    if (cells[2] == "rough-l1") {
      saw_rough = true;
      CHECK(mx < 1.0);  // |fluct| well below N |A| sup
    }
    if (cells[2].rfind("moment-", 0) == 0) saw_moment = true;
  }
  CHECK(saw_energy);
  CHECK(saw_rough);
  CHECK(saw_moment);
}
