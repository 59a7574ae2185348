#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/rng.hpp"

namespace loggas {

struct Moments {
  double mean = 0.0, variance = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
  std::size_t count = 0;
};

inline Moments compute_moments(const std::vector<double>& x) {
  Moments m;
  m.count = x.size();
  if (x.empty()) return m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    double d = v - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  double n = static_cast<double>(x.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2 * n / std::max(1.0, n - 1.0);
  if (m2 > 0.0) {
    m.skewness = m3 / std::pow(m2, 1.5);
    m.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return m;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2)
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  double s = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) *
                  std::exp(-2.0 * k * k * lambda * lambda);
    s += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample KS against an arbitrary continuous CDF.
inline KsResult ks_test(std::vector<double> x,
                        const std::function<double(double)>& cdf) {
  if (x.empty()) throw InvalidArgument("ks_test: empty sample");
  std::sort(x.begin(), x.end());
  double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double f = cdf(x[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

inline KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_test_two_sample: empty");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    double fa = static_cast<double>(i) / static_cast<double>(a.size());
    double fb = static_cast<double>(j) / static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  double ne = static_cast<double>(a.size()) * static_cast<double>(b.size()) /
              static_cast<double>(a.size() + b.size());
  double sn = std::sqrt(ne);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

// Jarque-Bera; the statistic is asymptotically chi^2 with 2 dof.
inline KsResult jarque_bera(const std::vector<double>& x) {
  Moments m = compute_moments(x);
  double n = static_cast<double>(x.size());
  double jb = n / 6.0 *
              (m.skewness * m.skewness +
               0.25 * m.excess_kurtosis * m.excess_kurtosis);
  return {jb, std::exp(-0.5 * jb)};
}

struct BootstrapCi {
  double value = 0.0, lo = 0.0, hi = 0.0, se = 0.0;
};

template <class StatFn>
BootstrapCi bootstrap_ci(const std::vector<double>& x, StatFn&& stat,
                         std::uint64_t seed, int reps = 400,
                         double level = 0.95) {
  if (x.empty()) throw InvalidArgument("bootstrap_ci: empty sample");
  BootstrapCi out;
  out.value = stat(x);
  Rng rng(derive_seed(seed, 0xb00757a9ULL));
  std::vector<double> vals(reps);
  std::vector<double> resample(x.size());
  for (int r = 0; r < reps; ++r) {
    for (auto& v : resample) v = x[rng.index(x.size())];
    vals[r] = stat(resample);
  }
  std::sort(vals.begin(), vals.end());
  double alpha = 0.5 * (1.0 - level);
  auto pick = [&](double q) {
    double pos = q * (reps - 1);
    int k = static_cast<int>(pos);
    double f = pos - k;
    return vals[k] + f * (vals[std::min(k + 1, reps - 1)] - vals[k]);
  };
  out.lo = pick(alpha);
  out.hi = pick(1.0 - alpha);
  Moments m = compute_moments(vals);
  out.se = std::sqrt(m.variance);
  return out;
}

// Least-squares slope of y against x (used for log-log trend fits).
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("fit_slope: need >= 2 matched points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

inline double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw InvalidArgument("quantile: empty sample");
  std::sort(x.begin(), x.end());
  double pos = std::clamp(q, 0.0, 1.0) * (x.size() - 1);
  std::size_t k = static_cast<std::size_t>(pos);
  double f = pos - k;
  return x[k] + f * (x[std::min(k + 1, x.size() - 1)] - x[k]);
}

}  // namespace loggas
