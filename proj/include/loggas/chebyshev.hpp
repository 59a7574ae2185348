#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

// Chebyshev machinery on [-1,1]; callers handle the affine map to [a,b].
// Convention throughout: f(t) = c[0] + sum_{k>=1} c[k] T_k(t).

inline std::vector<double> chebyshev_nodes(int n) {
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = std::cos(kPi * (j + 0.5) / n);
  return x;
}

template <class F>
std::vector<double> chebyshev_coeffs(const F& f, int n) {
  std::vector<double> fx(n);
  for (int j = 0; j < n; ++j) fx[j] = f(std::cos(kPi * (j + 0.5) / n));
  std::vector<double> c(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += fx[j] * std::cos(kPi * k * (j + 0.5) / n);
    c[k] = (k == 0 ? 1.0 : 2.0) * s / n;
  }
  return c;
}

inline double clenshaw_t(const std::vector<double>& c, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) {
    double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + (c.empty() ? 0.0 : c[0]);
}

// f(t) = sum_{k>=0} d[k] U_k(t)
inline double clenshaw_u(const std::vector<double>& d, double t) {
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = d.size(); k-- > 1;) {
    double b0 = 2.0 * t * b1 - b2 + d[k];
    b2 = b1;
    b1 = b0;
  }
  return 2.0 * t * b1 - b2 + (d.empty() ? 0.0 : d[0]);
}

// d/dt of a T-series, returned again as a T-series (length n-1).
inline std::vector<double> chebyshev_derivative(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  if (n <= 1) return {0.0};
  std::vector<double> d(n, 0.0);
  for (int k = n - 1; k >= 1; --k)
    d[k - 1] = (k + 1 < n ? d[k + 1] : 0.0) + 2.0 * k * c[k];
  d[0] *= 0.5;
  d.resize(n - 1);
  return d;
}

// d/dt of a T-series as a U-series: T_k' = k U_{k-1}.
inline std::vector<double> chebyshev_derivative_u(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  if (n <= 1) return {0.0};
  std::vector<double> d(n - 1);
  for (int k = 1; k < n; ++k) d[k - 1] = k * c[k];
  return d;
}

// Indefinite integral of a T-series as a T-series; constant term set so that
// the antiderivative vanishes at t = 0 is NOT enforced here (c[0] left 0).
inline std::vector<double> chebyshev_antiderivative(const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  std::vector<double> A(n + 1, 0.0);
  if (n >= 1) A[1] += c[0];
  if (n >= 2) A[2] += c[1] / 4.0;
  for (int k = 2; k < n; ++k) {
    A[k + 1] += c[k] / (2.0 * (k + 1.0));
    A[k - 1] -= c[k] / (2.0 * (k - 1.0));
  }
  return A;
}

// Joukowski inverse: w(z) = z - sqrt(z^2-1) with the branch |w| <= 1.
// On the reals outside [-1,1] this is real with |w| < 1.
inline std::complex<double> joukowski_w(std::complex<double> z) {
  std::complex<double> s = std::sqrt(z * z - 1.0);
  std::complex<double> w = z - s;
  if (std::abs(w) > 1.0) w = z + s;
  return w;
}

inline double joukowski_w_real(double x) {
  if (std::abs(x) <= 1.0)
    throw InvalidArgument("joukowski_w_real: |x| must exceed 1");
  double s = std::sqrt(x * x - 1.0);
  return x > 0.0 ? x - s : x + s;
}

struct AffineMap {
  double a = -1.0, b = 1.0;
  double to_unit(double x) const { return (2.0 * x - a - b) / (b - a); }
  double from_unit(double t) const { return 0.5 * ((b - a) * t + a + b); }
  double jacobian() const { return 0.5 * (b - a); }  // dx/dt
};

}  // namespace loggas
