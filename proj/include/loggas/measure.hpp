#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

// A positive measure on the line with the evaluators every energy
// computation needs. h(x) = int -log|x-y| dmu(y) must be exact (closed form
// or spectrally accurate), since energy identities are checked against it.
class Measure1D {
 public:
  virtual ~Measure1D() = default;
  virtual double mass() const = 0;
  virtual double density(double x) const = 0;
  virtual double h(double x) const = 0;
  // int dmu(y)/(z - y), valid for z off the support
  virtual std::complex<double> stieltjes(std::complex<double> z) const = 0;
  // int int -log|x-y| dmu(x) dmu(y)
  virtual double log_energy() const = 0;
  virtual double support_lo() const = 0;
  virtual double support_hi() const = 0;
  virtual double integrate(const std::function<double(double)>& f) const = 0;
};

// Piecewise-constant density on a cell grid.
struct GridDensity {
  std::vector<double> edges;   // size K+1, increasing
  std::vector<double> values;  // size K, density per cell

  std::size_t cells() const { return values.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * width(i);
    return s;
  }
  static GridDensity uniform(double a, double b, std::size_t k, double value) {
    GridDensity g;
    g.edges.resize(k + 1);
    for (std::size_t i = 0; i <= k; ++i)
      g.edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(k);
    g.values.assign(k, value);
    return g;
  }
};

class GridMeasure : public Measure1D {
 public:
  explicit GridMeasure(GridDensity g) : g_(std::move(g)) {}

  double mass() const override { return g_.mass(); }

  double density(double x) const override {
    if (x < g_.edges.front() || x >= g_.edges.back()) return 0.0;
    auto it = std::upper_bound(g_.edges.begin(), g_.edges.end(), x);
    std::size_t i = static_cast<std::size_t>(it - g_.edges.begin()) - 1;
    if (i >= g_.cells()) i = g_.cells() - 1;
    return g_.values[i];
  }

  double h(double x) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < g_.cells(); ++i)
      s += g_.values[i] * cell_log_integral(g_.edges[i], g_.edges[i + 1], x);
    return s;
  }

  std::complex<double> stieltjes(std::complex<double> z) const override {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < g_.cells(); ++i)
      s += g_.values[i] * std::log((z - g_.edges[i]) / (z - g_.edges[i + 1]));
    return s;
  }

  double log_energy() const override {
    double s = 0.0;
    for (std::size_t i = 0; i < g_.cells(); ++i)
      for (std::size_t j = 0; j < g_.cells(); ++j)
        s += g_.values[i] * g_.values[j] *
             cell_log_double_integral(g_.edges[i], g_.edges[i + 1],
                                      g_.edges[j], g_.edges[j + 1]);
    return s;
  }

  double support_lo() const override { return g_.edges.front(); }
  double support_hi() const override { return g_.edges.back(); }

  double integrate(const std::function<double(double)>& f) const override {
    double s = 0.0;
    for (std::size_t i = 0; i < g_.cells(); ++i) {
      if (g_.values[i] == 0.0) continue;
      s += g_.values[i] * integrate_gl(f, g_.edges[i], g_.edges[i + 1], 8);
    }
    return s;
  }

  const GridDensity& grid() const { return g_; }

 private:
  GridDensity g_;
};

}  // namespace loggas
