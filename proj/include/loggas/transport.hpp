#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "loggas/chebyshev.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/errors.hpp"
#include "loggas/potential.hpp"
#include "loggas/quadrature.hpp"
#include "loggas/stats.hpp"
#include "loggas/testfunction.hpp"

namespace loggas {

// Xi_V[psi](x) = -psi(x) V'(x) + int (psi(x) - psi(y))/(x - y) dmu_V(y),
// with the removable singularity at y = x replaced by psi'(x).
inline double master_operator(const std::function<double(double)>& psi,
                              const EquilibriumMeasure& eq,
                              const Potential& pot, double x,
                              int quad_nodes = 512) {
  if (!eq.analytic())
    throw UnsupportedMeasure("master operator needs a spectral equilibrium");
  const double m = eq.center(), r = eq.half_width();
  const double px = psi(x);
  const double eps = 1e-6 * r;
  const double dpx = (psi(x + eps) - psi(x - eps)) / (2.0 * eps);
  auto rule = gauss_chebyshev_u(quad_nodes);
  double s = 0.0;
  for (int j = 0; j < quad_nodes; ++j) {
    double t = rule.nodes[j];
    double y = m + r * t;
    double dens = clenshaw_u(eq.u_coeffs(), t);  // density / sqrt(1-t^2)
    double q = std::abs(x - y) < 1e-9 * r ? dpx : (px - psi(y)) / (x - y);
    s += rule.weights[j] * dens * q;
  }
  return -px * pot.v1(x) + r * s;
}

// Transport map psi with Xi_V[psi] = xi + c_xi on the working box U.
//
// Inside the support, with xi(m + r t) = sum a_k T_k(t) the principal value
// has the closed form psi(m + r u) = -sum_{k>=1} a_k U_{k-1}(u) / (pi sum_n
// d_n U_n(u)). Outside, the second branch of the defining formula applies;
// its numerator integral is -sum_{k>=1} a_k w(z)^k with w the Joukowski
// inverse, and c_xi = -a_0 makes both branches vanish together at the edges.
class TransportMap {
 public:
  double psi(double x) const {
    double u = (x - m_) / r_;
    if (std::abs(u) <= 1.0) return clenshaw_t(psi_cheb_[0], u);
    double margin = 1e-3;
    if (std::abs(u) < 1.0 + margin) {
      // one-sided polynomial extrapolation through the vanishing denominator
      double sgn = u > 0.0 ? 1.0 : -1.0;
      double h = margin;
      double f1 = outside(m_ + r_ * sgn * (1.0 + h));
      double f2 = outside(m_ + r_ * sgn * (1.0 + 2.0 * h));
      double f3 = outside(m_ + r_ * sgn * (1.0 + 3.0 * h));
      double d = std::abs(u) - 1.0;
      // quadratic through (h,f1),(2h,f2),(3h,f3) evaluated at d
      double l1 = (d - 2.0 * h) * (d - 3.0 * h) / (2.0 * h * h);
      double l2 = -(d - h) * (d - 3.0 * h) / (h * h);
      double l3 = (d - h) * (d - 2.0 * h) / (2.0 * h * h);
      return l1 * f1 + l2 * f2 + l3 * f3;
    }
    return outside(x);
  }

  double psi_derivative(double x, int order) const {
    if (order == 0) return psi(x);
    if (order < 0 || order > 4)
      throw InvalidArgument("transport derivatives available up to order 4");
    double u = (x - m_) / r_;
    if (std::abs(u) <= 1.0)
      return clenshaw_t(psi_cheb_[order], u) / std::pow(r_, order);
    // central finite differences on the outside branch
    double h = 1e-3 * r_ * (std::abs(u) - 1.0 > 5e-3 ? 1.0 : 0.2);
    switch (order) {
      case 1: return (psi(x + h) - psi(x - h)) / (2.0 * h);
      case 2: return (psi(x + h) - 2.0 * psi(x) + psi(x - h)) / (h * h);
      case 3:
        return (psi(x + 2.0 * h) - 2.0 * psi(x + h) + 2.0 * psi(x - h) -
                psi(x - 2.0 * h)) / (2.0 * h * h * h);
      default:
        return (psi(x + 2.0 * h) - 4.0 * psi(x + h) + 6.0 * psi(x) -
                4.0 * psi(x - h) + psi(x - 2.0 * h)) / (h * h * h * h);
    }
  }

  double c_xi() const { return c_xi_; }
  double residual() const { return residual_; }
  double sup_psi() const { return sup_psi_; }
  double sup_psi_prime() const { return sup_psi_prime_; }
  double box_lo() const { return u_lo_; }
  double box_hi() const { return u_hi_; }
  double support_lo() const { return m_ - r_; }
  double support_hi() const { return m_ + r_; }
  const TestFunction& source() const { return xi_; }
  const EquilibriumMeasure& equilibrium() const { return eq_; }
  const Potential& potential() const { return pot_; }
  const std::vector<double>& inside_coeffs() const { return psi_cheb_[0]; }

  friend TransportMap solve_transport(const TestFunction&,
                                      const EquilibriumMeasure&,
                                      const Potential&, double);

 private:
  TransportMap(TestFunction xi, EquilibriumMeasure eq, Potential pot)
      : xi_(std::move(xi)), eq_(std::move(eq)), pot_(std::move(pot)) {}

  double outside(double x) const {
    double u = (x - m_) / r_;
    double w = joukowski_w_real(u);
    double num = xi_(x) + c_xi_;
    double wp = w;
    for (std::size_t k = 1; k < a_.size(); ++k) {
      num -= a_[k] * wp;
      wp *= w;
    }
    double den = eq_.stieltjes({x, 0.0}).real() - pot_.v1(x);
    return num / den;
  }

  TestFunction xi_;
  EquilibriumMeasure eq_;
  Potential pot_;
  double m_ = 0.0, r_ = 1.0;
  double c_xi_ = 0.0, residual_ = 0.0;
  double sup_psi_ = 0.0, sup_psi_prime_ = 0.0;
  double u_lo_ = 0.0, u_hi_ = 0.0;
  std::vector<double> a_;             // T-coefficients of xi on the support
  std::vector<double> psi_cheb_[5];   // T-coefficients of psi and derivatives
};

inline TransportMap solve_transport(const TestFunction& xi,
                                    const EquilibriumMeasure& eq,
                                    const Potential& pot,
                                    double residual_tol = 1e-4) {
  if (!eq.analytic() || eq.support().size() != 1)
    throw UnsupportedMeasure("transport needs a one-cut spectral equilibrium");
  TransportMap map(xi, eq, pot);
  map.m_ = eq.center();
  map.r_ = eq.half_width();
  const double m = map.m_, r = map.r_;
  // degenerate edges: the density factor S must not vanish at the endpoints
  double s_edge = std::min(std::abs(clenshaw_u(eq.u_coeffs(), 1.0)),
                           std::abs(clenshaw_u(eq.u_coeffs(), -1.0)));
  double s_peak = std::abs(clenshaw_u(eq.u_coeffs(), 0.0));
  if (s_edge < 1e-8 * std::max(1.0, s_peak))
    throw UnsupportedMeasure("degenerate support edge");

  // adaptive Chebyshev expansion of xi on the support
  auto sample = [&](double t) { return xi(m + r * t); };
  int n = 64;
  std::vector<double> a = chebyshev_coeffs(sample, n);
  double head = 0.0;
  for (; n < 8192;) {
    head = 0.0;
    double tail = 0.0;
    for (int k = 0; k < n; ++k) head = std::max(head, std::abs(a[k]));
    for (int k = n - n / 8; k < n; ++k) tail = std::max(tail, std::abs(a[k]));
    if (tail <= 1e-12 * std::max(head, 1e-30)) break;
    n *= 2;
    a = chebyshev_coeffs(sample, n);
  }
  while (a.size() > 1 && std::abs(a.back()) <= 1e-13 * std::max(head, 1e-30))
    a.pop_back();
  map.a_ = a;
  map.c_xi_ = -a[0];

  // psi inside as a smooth ratio of U-series, re-expanded in T
  std::vector<double> num_u(a.size() > 1 ? a.size() - 1 : 1, 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) num_u[k - 1] = a[k];
  const auto& d = eq.u_coeffs();
  auto psi_inside = [&](double t) {
    return -clenshaw_u(num_u, t) / (kPi * clenshaw_u(d, t));
  };
  int n_psi = std::min(2 * std::max<int>(64, static_cast<int>(a.size())), 8192);
  map.psi_cheb_[0] = chebyshev_coeffs(psi_inside, n_psi);
  double phead = 0.0;
  for (double c : map.psi_cheb_[0]) phead = std::max(phead, std::abs(c));
  while (map.psi_cheb_[0].size() > 1 &&
         std::abs(map.psi_cheb_[0].back()) <= 1e-13 * std::max(phead, 1e-30))
    map.psi_cheb_[0].pop_back();
  for (int k = 1; k <= 4; ++k)
    map.psi_cheb_[k] = chebyshev_derivative(map.psi_cheb_[k - 1]);

  // working box: support dilated by 1.5 about its center
  map.u_lo_ = m - 1.5 * r;
  map.u_hi_ = m + 1.5 * r;

  // bounds and residual verification over the box, with psi pretabulated
  // at the quadrature nodes so each check point costs O(nodes)
  int quad_nodes =
      std::max(512, 4 * static_cast<int>(map.psi_cheb_[0].size()));
  auto rule = gauss_chebyshev_u(quad_nodes);
  std::vector<double> yv(quad_nodes), py(quad_nodes), sv(quad_nodes);
  for (int j = 0; j < quad_nodes; ++j) {
    double t = rule.nodes[j];
    yv[j] = m + r * t;
    py[j] = clenshaw_t(map.psi_cheb_[0], t);
    sv[j] = clenshaw_u(d, t);
  }
  double res = 0.0;
  const int checks = 80;
  for (int i = 0; i <= checks; ++i) {
    double x = map.u_lo_ + (map.u_hi_ - map.u_lo_) * i / checks;
    double u = (x - m) / r;
    if (std::abs(std::abs(u) - 1.0) < 5e-3) continue;  // edge seam
    double px = map.psi(x);
    double dpx = map.psi_derivative(x, 1);
    double s = 0.0;
    for (int j = 0; j < quad_nodes; ++j) {
      double q = std::abs(x - yv[j]) < 1e-9 * r ? dpx
                                                : (px - py[j]) / (x - yv[j]);
      s += rule.weights[j] * sv[j] * q;
    }
    double lhs = -px * pot.v1(x) + r * s;
    res = std::max(res, std::abs(lhs - xi(x) - map.c_xi_));
    map.sup_psi_ = std::max(map.sup_psi_, std::abs(px));
    map.sup_psi_prime_ = std::max(map.sup_psi_prime_, std::abs(dpx));
  }
  // refine the derivative bound inside the support (it drives flow validity)
  for (int i = 0; i <= 400; ++i) {
    double u = -1.0 + 2.0 * i / 400.0;
    map.sup_psi_ = std::max(
        map.sup_psi_, std::abs(clenshaw_t(map.psi_cheb_[0], u)));
    map.sup_psi_prime_ = std::max(
        map.sup_psi_prime_, std::abs(clenshaw_t(map.psi_cheb_[1], u)) / r);
  }
  map.residual_ = res;
  if (res > residual_tol)
    throw ResidualTooLarge("transport residual " + std::to_string(res));
  return map;
}

// phi_t(x) = x + t psi(x); valid while ||t psi'|| < 1/2
inline void require_flow_time(const TransportMap& map, double t) {
  if (std::abs(t) * map.sup_psi_prime() >= 0.5)
    throw TooLargeT("|t| sup|psi'| = " +
                    std::to_string(std::abs(t) * map.sup_psi_prime()));
}

inline double transport_flow(const TransportMap& map, double t, double x) {
  require_flow_time(map, t);
  return x + t * map.psi(x);
}

// total mass of the push-forward measure, recomputed in the image variable
inline double push_forward_mass_check(const TransportMap& map, double t) {
  require_flow_time(map, t);
  if (t == 0.0) return 0.0;  // identity map
  const auto& eq = map.equilibrium();
  double a = eq.support_lo(), b = eq.support_hi();
  double za = a + t * map.psi(a), zb = b + t * map.psi(b);
  // invert phi_t by Newton (monotone since |t psi'| < 1/2)
  auto inv = [&](double z) {
    double x = std::clamp(z, a, b);
    for (int it = 0; it < 60; ++it) {
      double f = x + t * map.psi(x) - z;
      double fp = 1.0 + t * map.psi_derivative(x, 1);
      double step = f / fp;
      x -= step;
      x = std::clamp(x, a - 1e-12, b + 1e-12);
      if (std::abs(step) < 1e-14) break;
    }
    return x;
  };
  // image density keeps square-root edges, so weight them out explicitly
  auto rule = gauss_chebyshev_u(2048);
  double c = 0.5 * (za + zb), hw = 0.5 * (zb - za);
  double mass = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    double u = rule.nodes[j];
    double x = inv(c + hw * u);
    double dens = eq.density(x) / (1.0 + t * map.psi_derivative(x, 1));
    mass += rule.weights[j] * dens / std::sqrt(1.0 - u * u);
  }
  return hw * mass - eq.mass();
}

// tau_t(x) = F(t,psi)(x) - F(0,0)(x) + t c_xi with the log singularity
// removed through the smooth ratio (phi_t(x) - phi_t(y))/(x - y).
// Only fluctuations of tau_t are consumed downstream, so the additive
// constant is free; +t c_xi is the choice that cancels the first-order
// term entirely (F(t) - F(0) = -t c_xi + O(t^2) by the defining equation),
// giving the quadratic smallness the estimates assert.
inline double energy_difference(const TransportMap& map,
                                const EquilibriumMeasure& eq,
                                const Potential& pot, const TestFunction& xi,
                                double t, double x) {
  require_flow_time(map, t);
  if (t == 0.0) return 0.0;
  double fx = x + t * map.psi(x);
  double ratio_int = eq.integrate([&](double y) {
    double num = fx - (y + t * map.psi(y));
    double den = x - y;
    if (std::abs(den) < 1e-9 * map.equilibrium().half_width())
      return -std::log(std::abs(1.0 + t * map.psi_derivative(x, 1)));
    return -std::log(std::abs(num / den));
  });
  return ratio_int + pot.v(fx) + t * xi(fx) - pot.v(x) + t * map.c_xi();
}

struct DecayProfile {
  double exponent = 0.0;       // fitted |psi^(k)| ~ |x-z|^{-exponent}
  double inside_sup = 0.0;     // sup over supp(xi) of |psi^(k)| L^k
  std::size_t samples = 0;
};

// log-log decay fit of |psi^(k)| outside twice the bump support
inline DecayProfile decay_profile(const TransportMap& map, int order,
                                  double scale, double center) {
  DecayProfile out;
  std::vector<double> lx, ly;
  double a = map.support_lo(), b = map.support_hi();
  double margin = 0.02 * (b - a);
  for (double f = 2.0; ; f *= 1.4) {
    double dist = f * scale;
    bool any = false;
    for (double sgn : {-1.0, 1.0}) {
      double x = center + sgn * dist;
      if (x < a + margin || x > b - margin) continue;
      double v = std::abs(map.psi_derivative(x, order));
      if (v > 1e-14) {
        lx.push_back(std::log(dist));
        ly.push_back(std::log(v));
        any = true;
      }
    }
    if (!any && dist > (b - a)) break;
    if (dist > 0.5 * (b - a)) break;
  }
  if (lx.size() < 4)
    throw InsufficientRange("too few usable points outside the bump support");
  out.exponent = -fit_slope(lx, ly);
  out.samples = lx.size();
  for (int i = 0; i <= 200; ++i) {
    double x = center - scale + 2.0 * scale * i / 200.0;
    out.inside_sup = std::max(out.inside_sup,
                              std::abs(map.psi_derivative(x, order)) *
                                  std::pow(scale, order));
  }
  return out;
}

}  // namespace loggas
