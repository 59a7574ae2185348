#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

inline constexpr double kPi = 3.14159265358979323846;

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1,1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

template <class F>
double integrate_gl(const F& f, double a, double b, const QuadratureRule& rule) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

template <class F>
double integrate_gl(const F& f, double a, double b, int order = 32) {
  static thread_local int cached_order = -1;
  static thread_local QuadratureRule cached;
  if (order != cached_order) {
    cached = gauss_legendre(order);
    cached_order = order;
  }
  return integrate_gl(f, a, b, cached);
}

namespace detail {
template <class F>
double adapt_simpson(const F& f, double a, double b, double fa, double fm, double fb,
                     double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-10,
                          int max_depth = 40) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adapt_simpson(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Antiderivative helpers for the log kernel, with the removable value at 0.
//
//   d/dt [t - t log|t|]           = -log|t|
//   primitive_log_single(b-c) - primitive_log_single(a-c) = int_a^b -log|x-c| dx
inline double primitive_log_single(double t) {
  if (t == 0.0) return 0.0;
  return t - t * std::log(std::abs(t));
}

inline double cell_log_integral(double a, double b, double c) {
  return primitive_log_single(b - c) - primitive_log_single(a - c);
}

//   P(t) = (3/4) t^2 - (t^2/2) log|t|  satisfies  d^2/dxdy [-P(x-y)] ... see below
inline double primitive_log_double(double t) {
  if (t == 0.0) return 0.0;
  return 0.75 * t * t - 0.5 * t * t * std::log(std::abs(t));
}

// Exact int_{a1}^{a2} int_{b1}^{b2} -log|x-y| dy dx.
inline double cell_log_double_integral(double a1, double a2, double b1, double b2) {
  return -primitive_log_double(a2 - b2) + primitive_log_double(a2 - b1) +
         primitive_log_double(a1 - b2) - primitive_log_double(a1 - b1);
}

// Gauss-Chebyshev (first kind): int_{-1}^{1} f(t)/sqrt(1-t^2) dt.
inline QuadratureRule gauss_chebyshev_t(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, kPi / n);
  for (int i = 0; i < n; ++i)
    rule.nodes[i] = std::cos(kPi * (i + 0.5) / n);
  return rule;
}

// Gauss-Chebyshev (second kind): int_{-1}^{1} f(t) sqrt(1-t^2) dt.
inline QuadratureRule gauss_chebyshev_u(int n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 1; i <= n; ++i) {
    double th = kPi * i / (n + 1.0);
    rule.nodes[i - 1] = std::cos(th);
    double s = std::sin(th);
    rule.weights[i - 1] = kPi / (n + 1.0) * s * s;
  }
  return rule;
}

}  // namespace loggas
