#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

// Smooth test functions with derivative evaluators up to order 4.
struct TestFunction {
  std::string label;
  int smoothness = 4;  // C^k tag; 4 means at least C^4 available
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  bool compact = false;
  // bump parameters when applicable
  double center = 0.0, scale = 1.0;
  std::function<double(double, int)> eval;  // (x, derivative order 0..4)

  double operator()(double x) const { return eval(x, 0); }
  double derivative(double x, int order) const {
    if (order < 0 || order > 4)
      throw InvalidArgument("test function derivatives available up to order 4");
    return eval(x, order);
  }

  // sup of |f^(k)| over the (effective) support, by dense sampling
  double c_norm(int order, int samples = 4001) const {
    double lo = compact ? support_lo : center - 20.0 * scale;
    double hi = compact ? support_hi : center + 20.0 * scale;
    double m = 0.0;
    for (int i = 0; i <= samples; ++i) {
      double x = lo + (hi - lo) * i / samples;
      m = std::max(m, std::abs(eval(x, order)));
    }
    return m;
  }

  // theta(s) = exp(-1/(1-s^2)) on (-1,1): the standard smooth bump
  static double bump_core(double s, int order) {
    double s2 = s * s;
    if (s2 >= 1.0) return 0.0;
    double p = 1.0 / (1.0 - s2);
    double th = std::exp(-p);
    if (order == 0) return th;
    double p2 = p * p, p3 = p2 * p, p4 = p3 * p, p5 = p4 * p;
    double g1 = -2.0 * s * p2;
    double g2 = -2.0 * p2 - 8.0 * s2 * p3;
    double g3 = -24.0 * s * p3 - 48.0 * s * s2 * p4;
    double g4 = -24.0 * p3 - 288.0 * s2 * p4 - 384.0 * s2 * s2 * p5;
    switch (order) {
      case 1: return g1 * th;
      case 2: return (g2 + g1 * g1) * th;
      case 3: return (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * th;
      case 4:
        return (g4 + 4.0 * g1 * g3 + 3.0 * g2 * g2 + 6.0 * g1 * g1 * g2 +
                g1 * g1 * g1 * g1) * th;
      default:
        throw InvalidArgument("bump derivatives available up to order 4");
    }
  }

  // xi_{z,L}(x) = theta((x - z)/L)
  static TestFunction rescaled_bump(double z, double L) {
    if (L <= 0.0) throw InvalidArgument("bump scale must be positive");
    TestFunction f;
    f.label = "bump(z=" + std::to_string(z) + ",L=" + std::to_string(L) + ")";
    f.support_lo = z - L;
    f.support_hi = z + L;
    f.compact = true;
    f.center = z;
    f.scale = L;
    f.eval = [z, L](double x, int order) {
      return bump_core((x - z) / L, order) / std::pow(L, order);
    };
    return f;
  }

  // kappa_{a,h}(x) = 2 pi (x - a)/((a-x)^2 + h^2) = 2 pi Re(1/(x - a + i h))
  static TestFunction kappa(double a, double h) {
    if (h <= 0.0) throw InvalidArgument("kappa height must be positive");
    TestFunction f;
    f.label = "kappa(a=" + std::to_string(a) + ",h=" + std::to_string(h) + ")";
    f.center = a;
    f.scale = h;
    f.eval = [a, h](double x, int order) {
      std::complex<double> w(x - a, h);
      std::complex<double> d = 1.0 / w;
      double fact = 1.0;
      for (int k = 1; k <= order; ++k) {
        d /= w;
        fact *= -k;
      }
      return 2.0 * kPi * (fact * d).real();
    };
    return f;
  }

  // zeta_{a,h}(x) = -2 pi h/((a-x)^2 + h^2) = 2 pi Im(1/(x - a + i h))
  static TestFunction zeta(double a, double h) {
    if (h <= 0.0) throw InvalidArgument("zeta height must be positive");
    TestFunction f;
    f.label = "zeta(a=" + std::to_string(a) + ",h=" + std::to_string(h) + ")";
    f.center = a;
    f.scale = h;
    f.eval = [a, h](double x, int order) {
      std::complex<double> w(x - a, h);
      std::complex<double> d = 1.0 / w;
      double fact = 1.0;
      for (int k = 1; k <= order; ++k) {
        d /= w;
        fact *= -k;
      }
      return 2.0 * kPi * (fact * d).imag();
    };
    return f;
  }

  // p(x) = sum_k coeffs[k] x^k
  static TestFunction polynomial(std::vector<double> coeffs) {
    TestFunction f;
    f.label = "poly(";
    for (double c : coeffs) f.label += std::to_string(c) + ",";
    f.label += ")";
    f.eval = [c = std::move(coeffs)](double x, int order) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(order);) {
        double fac = 1.0;
        for (int j = 0; j < order; ++j) fac *= static_cast<double>(k - j);
        s = s * x + fac * c[k];
      }
      return s;
    };
    return f;
  }

  static TestFunction zero() {
    TestFunction f;
    f.label = "zero";
    f.compact = true;
    f.support_lo = f.support_hi = 0.0;
    f.eval = [](double, int) { return 0.0; };
    return f;
  }
};

}  // namespace loggas
