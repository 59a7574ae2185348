#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "loggas/errors.hpp"

namespace loggas {

// Confinement potential with derivatives up to third order. Analytic
// derivatives may be supplied; otherwise central finite differences kick in.
class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential(Fn v, std::string label)
      : v_(std::move(v)), label_(std::move(label)) {}

  Potential(Fn v, Fn v1, Fn v2, Fn v3, std::string label)
      : v_(std::move(v)), v1_(std::move(v1)), v2_(std::move(v2)),
        v3_(std::move(v3)), label_(std::move(label)) {}

  double v(double x) const { return v_(x); }

  double v1(double x) const {
    if (v1_) return v1_(x);
    const double h = fd_step(x);
    return (v_(x + h) - v_(x - h)) / (2.0 * h);
  }

  double v2(double x) const {
    if (v2_) return v2_(x);
    const double h = fd_step(x) * 8.0;
    return (v_(x + h) - 2.0 * v_(x) + v_(x - h)) / (h * h);
  }

  double v3(double x) const {
    if (v3_) return v3_(x);
    const double h = fd_step(x) * 64.0;
    return (v_(x + 2 * h) - 2.0 * v_(x + h) + 2.0 * v_(x - h) - v_(x - 2 * h)) /
           (2.0 * h * h * h);
  }

  const std::string& label() const { return label_; }

  // V(x) - log|x| must be strictly increasing over |x| in {10, 100, 1000}
  // (checked on both sides); this is confinement against the log repulsion.
  bool passes_growth_check() const {
    for (double sign : {1.0, -1.0}) {
      double prev = v_(sign * 10.0) - std::log(10.0);
      for (double r : {100.0, 1000.0}) {
        double cur = v_(sign * r) - std::log(r);
        if (!(cur > prev) || !std::isfinite(cur)) return false;
        prev = cur;
      }
    }
    return true;
  }

  void require_confining() const {
    if (!passes_growth_check())
      throw NonConfining("potential '" + label_ + "' fails the growth check");
  }

  static Potential quadratic() {
    return Potential([](double x) { return x * x; },
                     [](double x) { return 2.0 * x; },
                     [](double) { return 2.0; },
                     [](double) { return 0.0; }, "x^2");
  }

  static Potential quartic(double g = 1.0) {
    return Potential([g](double x) { return g * x * x * x * x; },
                     [g](double x) { return 4.0 * g * x * x * x; },
                     [g](double x) { return 12.0 * g * x * x; },
                     [g](double x) { return 24.0 * g * x; },
                     "x^4");
  }

 private:
  static double fd_step(double x) {
    return 1e-5 * std::max(1.0, std::abs(x));
  }

  Fn v_, v1_, v2_, v3_;
  std::string label_;
};

}  // namespace loggas
