#pragma once

#include <cmath>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
// algorithm (eigenvalues only, no vectors). diag has size n, offdiag n-1.
// Relative deflation threshold 1e-14, at most 64 iterations per eigenvalue.
inline std::vector<double> tridiagonal_eigenvalues(std::vector<double> d,
                                                   std::vector<double> e) {
  const std::size_t n = d.size();
  if (n == 0) return {};
  if (e.size() != n - 1)
    throw InvalidArgument("tridiagonal_eigenvalues: offdiag size mismatch");
  e.push_back(0.0);
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-14 * dd) break;
      }
      if (m != l) {
        if (iter++ == 64)
          throw EigensolverFailure("QL: no convergence within 64 iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i], b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (!underflow) {
          d[l] -= p;
          e[l] = g;
          e[m] = 0.0;
        }
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace loggas
