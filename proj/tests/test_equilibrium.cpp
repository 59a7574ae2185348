#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "loggas/equilibrium.hpp"
#include "loggas/potential.hpp"

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
}  // namespace

TEST_CASE("growth check", "[equilibrium]") {
  CHECK(quad_pot().passes_growth_check());
  Potential flat([](double) { return 0.0; }, "0");
  CHECK_FALSE(flat.passes_growth_check());
  CHECK_THROWS_AS(solve_equilibrium(flat, 512), NonConfining);
}

TEST_CASE("analytic one-cut solve for V = x^2", "[equilibrium]") {
  const auto& eq = semicircle();
  REQUIRE(eq.support().size() == 1);
  CHECK_THAT(eq.support()[0].a, Catch::Matchers::WithinAbs(-1.0, 1e-10));
  CHECK_THAT(eq.support()[0].b, Catch::Matchers::WithinAbs(1.0, 1e-10));
  CHECK_THAT(eq.density(0.0), Catch::Matchers::WithinAbs(2.0 / kPi, 1e-10));
  CHECK_THAT(eq.c_v(), Catch::Matchers::WithinAbs(std::log(2.0) + 0.5, 1e-10));
  CHECK_THAT(eq.mass(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  // density nonnegative, sqrt edge profile
  for (double x : {-0.99, -0.5, 0.3, 0.97})
    CHECK(eq.density(x) >= 0.0);
  CHECK_THAT(eq.s_factor(0.4), Catch::Matchers::WithinAbs(2.0 / kPi, 1e-10));
  CHECK_THAT(eq.sigma(0.6), Catch::Matchers::WithinAbs(0.8, 1e-12));
}

TEST_CASE("h evaluator matches independent quadrature", "[equilibrium]") {
  const auto& eq = semicircle();
  for (double x : {0.0, 0.5, 0.95, 1.3, 2.0, -3.7}) {
    // split at the evaluation point to tame the log singularity
    double a = -1.0, b = 1.0;
    double ref = 0.0;
    auto f = [&](double y) {
      return -std::log(std::abs(x - y)) * eq.density(y);
    };
    if (x > a && x < b) {
      // keep the adaptive rule off the log singularity itself
      ref = integrate_adaptive(f, a, x - 1e-11, 1e-12) +
            integrate_adaptive(f, x + 1e-11, b, 1e-12);
    } else {
      ref = integrate_adaptive(f, a, b, 1e-12);
    }
    CHECK_THAT(eq.h(x), Catch::Matchers::WithinAbs(ref, 5e-7));
  }
}

TEST_CASE("Euler-Lagrange residual and effective potential", "[equilibrium]") {
  const auto& eq = semicircle();
  for (double x = -0.9; x <= 0.9; x += 0.1)
    CHECK(std::abs(effective_potential(eq, quad_pot(), x)) < 1e-10);
  CHECK_THAT(effective_potential(eq, quad_pot(), 0.5),
             Catch::Matchers::WithinAbs(0.0, 1e-3));
  double z2 = effective_potential(eq, quad_pot(), 2.0);
  double z3 = effective_potential(eq, quad_pot(), 3.0);
  CHECK(z2 > 0.0);
  CHECK(z3 > z2);
  // known closed form at x=2: zeta(2) = x^2... check against quadrature of h
  double href = integrate_adaptive(
      [&](double y) { return -std::log(std::abs(2.0 - y)) * eq.density(y); },
      -1.0, 1.0, 1e-12);
  CHECK_THAT(z2, Catch::Matchers::WithinAbs(href + 4.0 - eq.c_v(), 1e-6));
}

TEST_CASE("stieltjes transform of the semicircle", "[equilibrium]") {
  const auto& eq = semicircle();
  // C(z) = 2(z - sqrt(z^2-1)) for the semicircle on [-1,1]
  for (std::complex<double> z : {std::complex<double>(0.2, 0.7),
                                 std::complex<double>(1.8, 0.0),
                                 std::complex<double>(-0.4, -1.1)}) {
    auto ref = 2.0 * (z - std::sqrt(z * z - 1.0));
    if (std::abs(2.0 * z - ref) < std::abs(ref)) ref = 2.0 * (z + std::sqrt(z * z - 1.0));
    // pick the decaying branch ~ 1/z
    auto w = joukowski_w(z);
    ref = 2.0 * w;
    CHECK(std::abs(eq.stieltjes(z) - ref) < 1e-12);
  }
}

TEST_CASE("discretized minimization oracle for V = x^2", "[equilibrium]") {
  auto eq = solve_equilibrium(quad_pot(), 2048,
                              EquilibriumMethod::discretized_minimization);
  CHECK_THAT(eq.density(0.0), Catch::Matchers::WithinAbs(2.0 / kPi, 1e-3));
  REQUIRE(eq.support().size() == 1);
  CHECK_THAT(eq.support()[0].a, Catch::Matchers::WithinAbs(-1.0, 1e-2));
  CHECK_THAT(eq.support()[0].b, Catch::Matchers::WithinAbs(1.0, 1e-2));
  CHECK_THAT(eq.c_v(), Catch::Matchers::WithinAbs(std::log(2.0) + 0.5, 1e-3));
  // Euler-Lagrange residual on the bulk
  for (double x = -0.7; x <= 0.7; x += 0.2)
    CHECK(std::abs(effective_potential(eq, quad_pot(), x)) < 1e-3);
  // off support: zeta >= 0
  CHECK(effective_potential(eq, quad_pot(), 1.5) > 0.0);
}

TEST_CASE("energy functional", "[equilibrium]") {
  Potential zero([](double) { return 0.0; }, "0");
  auto uni = GridDensity::uniform(0.0, 1.0, 128, 1.0);
  CHECK_THAT(energy_functional(uni, zero),
             Catch::Matchers::WithinAbs(0.75, 1e-10));
  auto bad = GridDensity::uniform(0.0, 1.0, 16, 0.9);
  CHECK_THROWS_AS(energy_functional(bad, zero), NotAProbability);
  // minimality of mu_V among perturbed admissible densities
  const auto& eq = semicircle();
  double ivmin = equilibrium_energy(eq, quad_pot());
  CHECK_THAT(ivmin, Catch::Matchers::WithinAbs(
                        energy_functional(eq.grid(), quad_pot()), 2e-4));
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    GridDensity g = eq.grid();
    for (auto& v : g.values) v = std::max(0.0, v * (0.7 + 0.6 * unif(gen)));
    double mass = g.mass();
    for (auto& v : g.values) v /= mass;
    CHECK(energy_functional(g, quad_pot()) >= ivmin - 1e-6);
  }
}

TEST_CASE("blow-up scaling", "[equilibrium]") {
  const auto& eq = semicircle();
  auto mu1 = blow_up(eq, 1.0);
  CHECK_THAT(mu1.mass(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(mu1.density(0.3), Catch::Matchers::WithinAbs(eq.density(0.3), 1e-14));
  auto mu = blow_up(eq, 100.0);
  CHECK_THAT(mu.mass(), Catch::Matchers::WithinAbs(100.0, 1e-4));
  CHECK_THAT(mu.support_lo(), Catch::Matchers::WithinAbs(-100.0, 1e-9));
  CHECK_THAT(mu.support_hi(), Catch::Matchers::WithinAbs(100.0, 1e-9));
  // sup-norm preserved
  CHECK_THAT(mu.density(0.0), Catch::Matchers::WithinAbs(eq.density(0.0), 1e-14));
  // h scaling: h_{mu'}(nx) = n (h_mu(x) - log n)
  double n = 100.0, x = 0.37;
  CHECK_THAT(mu.h(n * x),
             Catch::Matchers::WithinAbs(n * (eq.h(x) - std::log(n)), 1e-8));
  // integrate: int f dmu' = n int f(n y) dmu(y)
  double got = mu.integrate([](double y) { return std::exp(-y * y / 5000.0); });
  double ref = 100.0 * eq.integrate(
                           [](double y) { return std::exp(-y * y * 2.0); });
  CHECK_THAT(got, Catch::Matchers::WithinRel(ref, 1e-9));
}

TEST_CASE("multi-cut detection for a double well", "[equilibrium]") {
  // deep double well forces a two-cut measure; the one-cut solver must refuse
  Potential dw([](double x) { return 0.25 * x * x * x * x - 2.0 * x * x; },
               [](double x) { return x * x * x - 4.0 * x; },
               [](double x) { return 3.0 * x * x - 4.0; },
               [](double x) { return 6.0 * x; }, "double-well");
  CHECK_THROWS_AS(solve_equilibrium(dw, 512), MultiCutDetected);
}

TEST_CASE("solver determinism", "[equilibrium]") {
  auto a = solve_equilibrium(quad_pot(), 512);
  auto b = solve_equilibrium(quad_pot(), 512);
  CHECK(a.c_v() == b.c_v());
  CHECK(a.support()[0].a == b.support()[0].a);
  CHECK(a.u_coeffs() == b.u_coeffs());
}
