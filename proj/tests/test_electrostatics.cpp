#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "loggas/electrostatics.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/sampler.hpp"
#include "loggas/stats.hpp"

using namespace loggas;

namespace {

const Potential& quad_pot() {
  static Potential p = Potential::quadratic();
  return p;
}
const EquilibriumMeasure& semicircle() {
  static EquilibriumMeasure eq = solve_equilibrium(quad_pot(), 1024);
  return eq;
}

Configuration make_config(std::vector<double> pts) {
  Configuration c;
  c.points = std::move(pts);
  c.finalize();
  c.beta = 2.0;
  return c;
}

// deterministic bulk positions: equilibrium quantiles, blown up by n
Configuration blown_quantiles(std::size_t n) {
  const auto& eq = semicircle();
  std::vector<double> cdfq(n);
  // midpoints of n equal-mass strata via bisection on the closed-form density
  for (std::size_t k = 0; k < n; ++k) {
    double target = (k + 0.5) / static_cast<double>(n);
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      double mass = integrate_gl(
          [&](double y) { return eq.density(y); }, -1.0, mid, 64);
      (mass < target ? lo : hi) = mid;
    }
    cdfq[k] = 0.5 * (lo + hi) * static_cast<double>(n);
  }
  return make_config(std::move(cdfq));
}

Configuration blown_sample(std::size_t n, std::uint64_t seed) {
  auto cfg = sample_tridiagonal(n, 2.0, seed);
  for (auto& x : cfg.points) x *= static_cast<double>(n);
  return cfg;
}

}  // namespace

TEST_CASE("minimal distances", "[electrostatics]") {
  auto r = minimal_distances(make_config({0.0, 0.4, 3.0}));
  CHECK_THAT(r.eta[0], Catch::Matchers::WithinAbs(0.1, 1e-15));
  CHECK_THAT(r.eta[1], Catch::Matchers::WithinAbs(0.1, 1e-15));
  CHECK_THAT(r.eta[2], Catch::Matchers::WithinAbs(0.25, 1e-15));
  auto r2 = minimal_distances(make_config({0.0, 5.0}));
  CHECK(r2.eta == std::vector<double>{0.25, 0.25});
  auto r1 = minimal_distances(make_config({1.0}));
  CHECK(r1.eta == std::vector<double>{0.25});
}

TEST_CASE("local minimal distances", "[electrostatics]") {
  Window w{0.0, 10.0, 5.0};
  auto cfg = make_config({0.1, 5.0, 5.2});
  auto r = local_minimal_distances(cfg, w);
  CHECK_THAT(r.eta[0], Catch::Matchers::WithinAbs(0.25, 1e-15));
  CHECK_THAT(r.eta[1], Catch::Matchers::WithinAbs(0.05, 1e-15));
  CHECK_THAT(r.eta[2], Catch::Matchers::WithinAbs(0.05, 1e-15));
  // shrinking the window never decreases the truncation radii
  Window w2{4.0, 6.0, 5.0};
  auto rs = local_minimal_distances(cfg, w2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(rs.eta[i] >= r.eta[i] - 1e-15);
  // neighbors outside the window are ignored
  Window w3{4.0, 5.1, 5.0};  // only x=5 inside, 0.6 from the boundary... use wider
  Window w4{2.0, 5.1, 5.0};
  auto r4 = local_minimal_distances(make_config({4.0, 5.0, 5.2}), w4);
  // x=4: the only in-window neighbor is 5.0 (5.2 is outside)
  CHECK_THAT(r4.eta[0], Catch::Matchers::WithinAbs(0.25, 1e-15));
  (void)w3;
}

TEST_CASE("truncation function", "[electrostatics]") {
  CHECK(truncation_function(0.25, 0.5) == 0.0);
  CHECK_THAT(truncation_function(0.25, 0.1),
             Catch::Matchers::WithinAbs(std::log(2.5), 1e-14));
  CHECK(truncation_function(0.25, 0.25) == 0.0);
  CHECK(std::isinf(truncation_function(0.25, 0.0)));
  CHECK_THROWS_AS(truncation_function(0.0, 1.0), InvalidArgument);
}

TEST_CASE("next order energy against closed forms", "[electrostatics]") {
  // Lebesgue measure on [0,2] (mass 2), points {0.5, 1.5}
  auto mu = GridMeasure(GridDensity::uniform(0.0, 2.0, 256, 1.0));
  auto cfg = make_config({0.5, 1.5});
  auto e = next_order_energy(cfg, mu);
  double h_half = 2.0 - 1.5 * std::log(1.5) - 0.5 * std::log(0.5);
  double exact = 0.5 * (0.0 - 4.0 * h_half + (6.0 - 4.0 * std::log(2.0)));
  CHECK_THAT(e.total, Catch::Matchers::WithinAbs(exact, 1e-9));
  CHECK_THAT(e.total, Catch::Matchers::WithinAbs(-1.8630, 2e-4));
  CHECK(e.total ==
        0.5 * (e.pair_sum + e.cross_term + e.background_term));

  // translation invariance
  auto mu_shift = GridMeasure(GridDensity::uniform(3.0, 5.0, 256, 1.0));
  auto cfg_shift = make_config({3.5, 4.5});
  CHECK_THAT(next_order_energy(cfg_shift, mu_shift).total,
             Catch::Matchers::WithinAbs(e.total, 1e-10));

  // mass mismatch
  auto bad = GridMeasure(GridDensity::uniform(0.0, 2.0, 256, 0.5));
  CHECK_THROWS_AS(next_order_energy(cfg, bad), MassMismatch);
  // coincident points
  Configuration co;
  co.points = {0.5, 0.5};
  CHECK_THROWS_AS(next_order_energy(co, mu), CoincidentPoints);
}

TEST_CASE("splitting formula residual", "[electrostatics]") {
  const auto& eq = semicircle();
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> jit(-0.3, 0.3);
  double worst_rel = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::size_t n = std::vector<std::size_t>{8, 32, 128, 256}[rep % 4];
    auto cfg = blown_quantiles(n);
    for (auto& x : cfg.points) x = x / static_cast<double>(n) + jit(gen) / n;
    cfg.finalize();
    double res = splitting_check(cfg, quad_pot(), eq);
    worst_rel = std::max(worst_rel, std::abs(res) / static_cast<double>(n));
  }
  CHECK(worst_rel <= 1e-3);

  // N = 1
  auto one = make_config({0.2});
  CHECK(std::abs(splitting_check(one, quad_pot(), eq)) <= 1e-6);

  // residual does not grow when the quadrature grid doubles (it is already
  // near spectral accuracy, so accept either halving or the noise floor)
  auto eq1 = solve_equilibrium(quad_pot(), 1024);
  auto eq2 = solve_equilibrium(quad_pot(), 2048);
  auto cfg = blown_quantiles(64);
  for (auto& x : cfg.points) x /= 64.0;
  cfg.finalize();
  double r1 = std::abs(splitting_check(cfg, quad_pot(), eq1));
  double r2 = std::abs(splitting_check(cfg, quad_pot(), eq2));
  CHECK(r2 <= std::max(0.6 * r1, 1e-9));
}

TEST_CASE("field identity with kernel fluctuations", "[electrostatics]") {
  const std::size_t n = 8;
  auto cfg = blown_quantiles(n);
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  TruncationVector none;
  none.eta.assign(n, 0.0);
  const double a = 0.7, h = 2.0;
  auto [ex, ey] = electric_field(cfg, mu, a, h, none);
  auto kappa = [&](double x) {
    return 2.0 * kPi * (x - a) / ((a - x) * (a - x) + h * h);
  };
  auto zeta = [&](double x) {
    return -2.0 * kPi * h / ((a - x) * (a - x) + h * h);
  };
  double sk = 0.0, sz = 0.0;
  for (double x : cfg.points) {
    sk += kappa(x);
    sz += zeta(x);
  }
  double ik = mu.integrate(kappa), iz = mu.integrate(zeta);
  CHECK_THAT(ex, Catch::Matchers::WithinAbs((sk - ik) / (2.0 * kPi), 1e-10));
  CHECK_THAT(ey, Catch::Matchers::WithinAbs((sz - iz) / (2.0 * kPi), 1e-10));

  // singular evaluation at a charge with eta = 0
  CHECK_THROWS_AS(electric_field(cfg, mu, cfg.points[3], 0.0, none),
                  SingularEvaluation);
}

TEST_CASE("far field decays like a dipole", "[electrostatics]") {
  const std::size_t n = 4;
  auto cfg = blown_quantiles(n);
  cfg.points[1] += 0.3;  // give the cluster a nonzero dipole moment
  cfg.finalize();
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  TruncationVector none;
  none.eta.assign(n, 0.0);
  std::vector<double> lr, lf;
  for (double r : {50.0, 100.0, 200.0, 400.0}) {
    auto [ex, ey] = electric_field(cfg, mu, 0.3 * r, r, none);
    lr.push_back(std::log(r));
    lf.push_back(std::log(std::hypot(ex, ey)));
  }
  double slope = fit_slope(lr, lf);
  CHECK(std::abs(slope + 2.0) < 0.2);
}

TEST_CASE("field form matches sum form", "[electrostatics]") {
  for (std::size_t n : {4ul, 16ul, 64ul}) {
    auto cfg = blown_sample(n, 1000 + n);
    auto mu = blow_up(semicircle(), static_cast<double>(n));
    auto sum = next_order_energy(cfg, mu);
    auto trunc = minimal_distances(cfg);
    double r = 1.6 * static_cast<double>(n) + 6.0;
    auto field = renormalized_energy_field_form(cfg, mu, trunc, r);
    INFO("n=" << n << " sum=" << sum.total << " field=" << field.total
              << " tail=" << field.tail_estimate);
    CHECK(std::abs(field.total - sum.total) <=
          0.01 * std::max(1.0, std::abs(sum.total)));
  }
}

TEST_CASE("field-form monotonicity in the truncation", "[electrostatics]") {
  const std::size_t n = 16;
  auto cfg = blown_sample(n, 7);
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  auto big = minimal_distances(cfg);
  TruncationVector small = big;
  for (auto& e : small.eta) e *= 0.5;
  double r = 1.6 * static_cast<double>(n) + 6.0;
  auto fb = renormalized_energy_field_form(cfg, mu, big, r);
  auto fs = renormalized_energy_field_form(cfg, mu, small, r);
  CHECK(fb.total <= fs.total + 1e-2 * static_cast<double>(n));

  TruncationVector too_big = big;
  for (auto& e : too_big.eta) e *= 2.0;
  CHECK_THROWS_AS(renormalized_energy_field_form(cfg, mu, too_big, r),
                  TruncationTooLarge);
}

TEST_CASE("local energy: empty window is nonnegative", "[electrostatics]") {
  const std::size_t n = 32;
  auto cfg = blown_quantiles(n);
  // park a window in a gap far outside the support
  Window w{1.5 * n, 1.5 * n + 4.0, 4.0};
  auto e = local_energy(cfg, blow_up(semicircle(), static_cast<double>(n)), w);
  CHECK(e.points_in_window == 0);
  CHECK(e.self_energy_sum == 0.0);
  CHECK(e.f_correction == 0.0);
  CHECK(e.total >= 0.0);
}

TEST_CASE("local energy: grid convergence", "[electrostatics]") {
  const std::size_t n = 64;
  auto cfg = blown_sample(n, 31);
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  Window w{-12.0, 12.0, 16.0};
  std::vector<double> vals;
  for (double refine : {1.0, 0.5, 0.25}) {
    FieldQuadratureOptions o;
    o.refine = refine;
    vals.push_back(local_energy(cfg, mu, w, o).total);
  }
  INFO("vals = " << vals[0] << ", " << vals[1] << ", " << vals[2]);
  CHECK(std::abs(vals[2] - vals[1]) <
        0.01 * std::max(1.0, std::abs(vals[2])));
  // window thinner than the largest truncation radius
  CHECK_THROWS_AS(local_energy(cfg, mu, Window{-12.0, 12.0, 1e-6}),
                  WindowTooThin);
}

TEST_CASE("local energy control constants are stable", "[electrostatics]") {
  const std::size_t n = 128;
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  std::vector<double> c_field, c_self;
  for (std::uint64_t s = 1; s <= 4; ++s) {
    auto cfg = blown_sample(n, 400 + s);
    Window w{-16.0, 16.0, 20.0};
    auto e = local_energy(cfg, mu, w);
    double cnt = static_cast<double>(e.points_in_window);
    REQUIRE(cnt > 0);
    // int |grad u|^2 <= 8 pi F + C #,  sum g(r_i) <= 2F + C' #
    c_field.push_back((e.field_integral - 8.0 * kPi * e.total) / cnt);
    c_self.push_back((e.self_energy_sum - 2.0 * e.total) / cnt);
  }
  for (double c : c_field) {
    CHECK(std::isfinite(c));
    CHECK(c < 100.0);
  }
  double fmin = *std::min_element(c_field.begin(), c_field.end());
  double fmax = *std::max_element(c_field.begin(), c_field.end());
  CHECK(fmax - fmin < 50.0);
  for (double c : c_self) CHECK(c < 100.0);
}

TEST_CASE("discrepancy", "[electrostatics]") {
  const std::size_t n = 16;
  auto cfg = blown_quantiles(n);
  auto mu = blow_up(semicircle(), static_cast<double>(n));
  // whole line
  CHECK_THAT(discrepancy(cfg, mu, -1e9, 1e9),
             Catch::Matchers::WithinAbs(0.0, 1e-6));
  // empty interval
  CHECK(discrepancy(cfg, mu, 3.0, 3.0) == -measure_mass(mu, 3.0, 3.0));
  CHECK(std::abs(discrepancy(cfg, mu, 3.0, 3.0)) < 1e-12);
  // hand-built: 3 points in [0,1], mass 2.5 there
  auto flat = GridMeasure(GridDensity::uniform(0.0, 1.0, 64, 2.5));
  auto three = make_config({0.2, 0.5, 0.8});
  CHECK_THAT(discrepancy(three, flat, 0.0, 1.0),
             Catch::Matchers::WithinAbs(0.5, 1e-8));
}
