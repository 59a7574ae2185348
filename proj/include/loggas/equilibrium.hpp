#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "loggas/chebyshev.hpp"
#include "loggas/errors.hpp"
#include "loggas/fft.hpp"
#include "loggas/measure.hpp"
#include "loggas/potential.hpp"
#include "loggas/quadrature.hpp"

namespace loggas {

struct Interval {
  double a = 0.0, b = 0.0;
  double length() const { return b - a; }
};

namespace detail {

// int_{-1}^{1} log|s| U_n(s) sqrt(1-s^2) ds, closed form (0 for odd n).
inline double log_weight_moment(int n) {
  if (n % 2 == 1) return 0.0;
  auto cosine_moment = [](int k) {  // int_0^pi log|cos t| cos(k t) dt, k even
    if (k == 0) return -kPi * std::log(2.0);
    int j = k / 2;
    return kPi * ((j % 2 == 1) ? 1.0 : -1.0) / (2.0 * j);
  };
  return 0.5 * (cosine_moment(n) - cosine_moment(n + 2));
}

// Antiderivative of w^{n+1} dx with x = (w + 1/w)/2, taken along the real
// w-axis (w in (0,1] or [-1,0)).
inline double joukowski_power_primitive(int n, double w) {
  if (n == 0) return 0.5 * (0.5 * w * w - std::log(std::abs(w)));
  return 0.5 * (std::pow(w, n + 2) / (n + 2) - std::pow(w, n) / n);
}

}  // namespace detail

// One-cut equilibrium measure in spectral form, or a general measure on a
// cell grid (discretized solve / user-supplied data). Mass is 1.
class EquilibriumMeasure : public Measure1D {
 public:
  // spectral one-cut: density(m + r u) = sqrt(1-u^2) * sum_n d[n] U_n(u)
  static EquilibriumMeasure spectral(double m, double r, std::vector<double> d,
                                     std::vector<double> vprime_antider,
                                     double c_v, std::string label,
                                     int grid_size) {
    EquilibriumMeasure eq;
    eq.analytic_ = true;
    eq.m_ = m;
    eq.r_ = r;
    eq.d_ = std::move(d);
    eq.vprime_antider_ = std::move(vprime_antider);
    eq.c_v_ = c_v;
    eq.label_ = std::move(label);
    eq.intervals_ = {{m - r, m + r}};
    eq.h_center_ = eq.compute_h_center();
    eq.build_grid(grid_size);
    eq.build_quadrature(std::max(grid_size / 8, 128));
    return eq;
  }

  static EquilibriumMeasure from_grid(GridDensity g, double c_v,
                                      std::string label) {
    double mass = g.mass();
    if (std::abs(mass - 1.0) > 1e-6)
      throw NotAProbability("grid measure mass " + std::to_string(mass));
    for (double v : g.values)
      if (v < 0.0) throw NotAProbability("negative density cell");
    EquilibriumMeasure eq;
    eq.analytic_ = false;
    eq.grid_ = std::move(g);
    eq.c_v_ = c_v;
    eq.label_ = std::move(label);
    eq.intervals_ = extract_support(eq.grid_);
    if (eq.intervals_.empty())
      throw NotAProbability("grid measure has empty support");
    return eq;
  }

  bool analytic() const { return analytic_; }
  const std::vector<Interval>& support() const { return intervals_; }
  double c_v() const { return c_v_; }
  const std::string& label() const { return label_; }
  const GridDensity& grid() const { return grid_; }
  const std::vector<double>& u_coeffs() const { return d_; }
  double center() const { return m_; }
  double half_width() const { return r_; }

  double bulk_margin() const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& iv : intervals_) d = std::min(d, iv.length());
    return 0.25 * d;
  }

  bool in_support(double x) const {
    for (const auto& iv : intervals_)
      if (x >= iv.a && x <= iv.b) return true;
    return false;
  }

  double sigma(double x) const {
    double p = 1.0;
    for (const auto& iv : intervals_)
      p *= std::sqrt(std::abs(x - iv.a) * std::abs(x - iv.b));
    return p;
  }

  double s_factor(double x) const {
    if (analytic_) {
      double u = (x - m_) / r_;
      if (std::abs(u) > 1.0) return 0.0;
      return clenshaw_u(d_, u) / r_;
    }
    double sig = sigma(x);
    return sig > 0.0 ? density(x) / sig : 0.0;
  }

  // --- Measure1D ---
  double mass() const override { return analytic_ ? 1.0 : grid_.mass(); }

  double density(double x) const override {
    if (analytic_) {
      double u = (x - m_) / r_;
      if (std::abs(u) >= 1.0) return 0.0;
      return std::sqrt(1.0 - u * u) * clenshaw_u(d_, u);
    }
    if (x < grid_.edges.front() || x >= grid_.edges.back()) return 0.0;
    auto it = std::upper_bound(grid_.edges.begin(), grid_.edges.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid_.edges.begin()) - 1;
    return grid_.values[std::min(i, grid_.cells() - 1)];
  }

  double h(double x) const override {
    if (!analytic_) return GridMeasure(grid_).h(x);
    double u = (x - m_) / r_;
    if (std::abs(u) <= 1.0) {
      // h' = -V' on the support, so h = h(center) - int_center^x V'
      return h_center_ - r_ * (clenshaw_t(vprime_antider_, u) -
                               clenshaw_t(vprime_antider_, 0.0));
    }
    double edge_u = (u > 0.0) ? 1.0 : -1.0;
    double h_edge = h_center_ - r_ * (clenshaw_t(vprime_antider_, edge_u) -
                                      clenshaw_t(vprime_antider_, 0.0));
    double w = joukowski_w_real(u);
    double s = 0.0;
    for (std::size_t n = 0; n < d_.size(); ++n)
      s += d_[n] * (detail::joukowski_power_primitive(static_cast<int>(n), w) -
                    detail::joukowski_power_primitive(static_cast<int>(n), edge_u));
    return h_edge - r_ * kPi * s;
  }

  std::complex<double> stieltjes(std::complex<double> z) const override {
    if (!analytic_) return GridMeasure(grid_).stieltjes(z);
    std::complex<double> zt = (z - m_) / r_;
    std::complex<double> w = joukowski_w(zt);
    std::complex<double> s = 0.0, wp = w;
    for (std::size_t n = 0; n < d_.size(); ++n) {
      s += d_[n] * wp;  // d_n * w^{n+1}
      wp *= w;
    }
    return kPi * s;
  }

  double log_energy() const override {
    if (!analytic_) return GridMeasure(grid_).log_energy();
    // int h dmu with h = c_V - V on support: use stored antiderivative
    return integrate([this](double x) { return h(x); });
  }

  double support_lo() const override { return intervals_.front().a; }
  double support_hi() const override { return intervals_.back().b; }

  double integrate(const std::function<double(double)>& f) const override {
    if (!analytic_) return GridMeasure(grid_).integrate(f);
    double s = 0.0;
    for (std::size_t i = 0; i < quad_x_.size(); ++i) s += quad_w_[i] * f(quad_x_[i]);
    return s;
  }

  const std::vector<double>& quad_nodes() const { return quad_x_; }
  const std::vector<double>& quad_weights() const { return quad_w_; }

  static std::vector<Interval> extract_support(const GridDensity& g) {
    double peak = *std::max_element(g.values.begin(), g.values.end());
    double thr = 1e-6 * peak;
    std::vector<Interval> out;
    bool open = false;
    Interval cur;
    for (std::size_t i = 0; i < g.cells(); ++i) {
      bool on = g.values[i] > thr;
      if (on && !open) {
        cur.a = g.edges[i];
        open = true;
      } else if (!on && open) {
        cur.b = g.edges[i];
        out.push_back(cur);
        open = false;
      }
    }
    if (open) {
      cur.b = g.edges.back();
      out.push_back(cur);
    }
    return out;
  }

 private:
  EquilibriumMeasure() = default;

  double compute_h_center() const {
    // h(m) = -log r - r * sum_n d_n * int log|s| U_n sqrt(1-s^2) ds
    double s = 0.0;
    for (std::size_t n = 0; n < d_.size(); ++n)
      s += d_[n] * detail::log_weight_moment(static_cast<int>(n));
    return -std::log(r_) - r_ * s;
  }

  void build_grid(int k) {
    grid_.edges.resize(k + 1);
    for (int j = 0; j <= k; ++j)
      grid_.edges[j] = m_ - r_ * std::cos(kPi * j / k);
    grid_.values.resize(k);
    for (int j = 0; j < k; ++j) {
      double mid = 0.5 * (grid_.edges[j] + grid_.edges[j + 1]);
      grid_.values[j] = density(mid);
    }
  }

  void build_quadrature(int n) {
    QuadratureRule rule = gauss_chebyshev_u(n);
    quad_x_.resize(n);
    quad_w_.resize(n);
    for (int i = 0; i < n; ++i) {
      quad_x_[i] = m_ + r_ * rule.nodes[i];
      quad_w_[i] = r_ * rule.weights[i] * clenshaw_u(d_, rule.nodes[i]);
    }
  }

  bool analytic_ = false;
  double m_ = 0.0, r_ = 1.0;
  std::vector<double> d_;
  std::vector<double> vprime_antider_;  // T-series: int V'(m + r t) dt
  double h_center_ = 0.0;
  double c_v_ = 0.0;
  std::vector<Interval> intervals_;
  GridDensity grid_;
  std::vector<double> quad_x_, quad_w_;
  std::string label_;
};

// mu'(x) = mu(x / n): mass n, support scaled by n, same sup-norm.
class ScaledMeasure : public Measure1D {
 public:
  ScaledMeasure(std::shared_ptr<const Measure1D> base, double n)
      : base_(std::move(base)), n_(n) {
    if (n_ < 1.0) throw InvalidArgument("blow-up factor must be >= 1");
  }

  double factor() const { return n_; }
  const Measure1D& base() const { return *base_; }

  double mass() const override { return n_ * base_->mass(); }
  double density(double x) const override { return base_->density(x / n_); }
  double h(double x) const override {
    return n_ * (base_->h(x / n_) - std::log(n_) * base_->mass());
  }
  std::complex<double> stieltjes(std::complex<double> z) const override {
    return base_->stieltjes(z / n_);
  }
  double log_energy() const override {
    double m = base_->mass();
    return n_ * n_ * (base_->log_energy() - std::log(n_) * m * m);
  }
  double support_lo() const override { return n_ * base_->support_lo(); }
  double support_hi() const override { return n_ * base_->support_hi(); }
  double integrate(const std::function<double(double)>& f) const override {
    return n_ * base_->integrate([&](double y) { return f(n_ * y); });
  }

 private:
  std::shared_ptr<const Measure1D> base_;
  double n_;
};

inline ScaledMeasure blow_up(const EquilibriumMeasure& eq, double n) {
  return ScaledMeasure(std::make_shared<EquilibriumMeasure>(eq), n);
}

// ---------------------------------------------------------------------------
// Solvers

namespace detail {

inline std::vector<double> vprime_coeffs(const Potential& pot, double m,
                                         double r, int n) {
  return chebyshev_coeffs([&](double t) { return pot.v1(m + r * t); }, n);
}

struct OneCutEndpoints {
  double m, r;
  std::vector<double> a;  // T-coeffs of V'(m + r t)
};

// Newton on (m, r): a_0(m,r) = 0 and r a_1(m,r)/2 = 1.
inline OneCutEndpoints solve_endpoints(const Potential& pot, int ncheb) {
  // crude initial center: scan for the minimum of V
  double m = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    double x = -10.0 + 0.01 * i;
    double v = pot.v(x);
    if (v < best) {
      best = v;
      m = x;
    }
  }
  double r = 1.0;
  auto residual = [&](double mm, double rr, std::vector<double>& a) {
    a = vprime_coeffs(pot, mm, rr, ncheb);
    return std::pair<double, double>{a[0], rr * a[1] / 2.0 - 1.0};
  };
  std::vector<double> a;
  for (int it = 0; it < 100; ++it) {
    auto [f1, f2] = residual(m, r, a);
    if (std::abs(f1) < 1e-13 && std::abs(f2) < 1e-13)
      return {m, r, a};
    double dm = 1e-7 * std::max(1.0, std::abs(m));
    double dr = 1e-7 * r;
    std::vector<double> tmp;
    auto [f1m, f2m] = residual(m + dm, r, tmp);
    auto [f1r, f2r] = residual(m, r + dr, tmp);
    double j11 = (f1m - f1) / dm, j12 = (f1r - f1) / dr;
    double j21 = (f2m - f2) / dm, j22 = (f2r - f2) / dr;
    double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300)
      throw NoConvergence("one-cut endpoint Newton: singular Jacobian");
    double sm = (j22 * f1 - j12 * f2) / det;
    double sr = (-j21 * f1 + j11 * f2) / det;
    double damp = 1.0;
    while (r - damp * sr <= 0.0) damp *= 0.5;
    m -= damp * sm;
    r -= damp * sr;
  }
  throw NoConvergence("one-cut endpoint Newton did not converge");
}

// Projection onto the probability simplex {p >= 0, sum p = 1}.
inline void project_simplex(std::vector<double>& p) {
  std::vector<double> u = p;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      theta = t;
      k = i + 1;
    }
  }
  (void)k;
  for (auto& x : p) x = std::max(0.0, x - theta);
}

// Symmetric Toeplitz matvec by circulant FFT embedding.
class ToeplitzOperator {
 public:
  explicit ToeplitzOperator(const std::vector<double>& first_row) {
    const std::size_t k = first_row.size();
    std::size_t mfft = 1;
    while (mfft < 2 * k) mfft <<= 1;
    kernel_hat_.assign(mfft, 0.0);
    for (std::size_t i = 0; i < k; ++i) kernel_hat_[i] = first_row[i];
    for (std::size_t i = 1; i < k; ++i) kernel_hat_[mfft - i] = first_row[i];
    fft_inplace(kernel_hat_);
    k_ = k;
  }

  std::vector<double> apply(const std::vector<double>& p) const {
    std::vector<std::complex<double>> x(kernel_hat_.size(), 0.0);
    for (std::size_t i = 0; i < k_; ++i) x[i] = p[i];
    fft_inplace(x);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= kernel_hat_[i];
    fft_inplace(x, true);
    std::vector<double> out(k_);
    for (std::size_t i = 0; i < k_; ++i) out[i] = x[i].real();
    return out;
  }

 private:
  std::vector<std::complex<double>> kernel_hat_;
  std::size_t k_ = 0;
};

struct BoxSolve {
  GridDensity density;
  std::vector<double> grad;  // h_i + V_i per cell at the solution
  double residual = 0.0;     // Euler-Lagrange residual over the support
};

inline BoxSolve minimize_on_box(const Potential& pot, double lo, double hi,
                                std::size_t k, int max_iter = 20000,
                                double tol = 5e-5) {
  const double w = (hi - lo) / static_cast<double>(k);
  std::vector<double> row(k);
  for (std::size_t j = 0; j < k; ++j)
    row[j] = cell_log_double_integral(0.0, w, j * w, (j + 1) * w) / (w * w);
  ToeplitzOperator T(row);
  std::vector<double> b(k);
  for (std::size_t i = 0; i < k; ++i) {
    double a = lo + i * w;
    b[i] = integrate_gl([&](double x) { return pot.v(x); }, a, a + w, 4) / w;
  }
  std::vector<double> p(k, 1.0 / static_cast<double>(k));
  auto grad = [&](const std::vector<double>& pp) {
    std::vector<double> g = T.apply(pp);
    for (std::size_t i = 0; i < k; ++i) g[i] += b[i];
    return g;
  };
  std::vector<double> g = grad(p);
  double step = 1.0;
  double res = std::numeric_limits<double>::infinity();
  std::vector<double> p_prev = p, g_prev = g;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) q[i] = p[i] - step * g[i];
    project_simplex(q);
    std::vector<double> gq = grad(q);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double s = q[i] - p[i], y = gq[i] - g[i];
      ss += s * s;
      sy += s * y;
    }
    p_prev = p;
    g_prev = g;
    p = q;
    g = gq;
    step = (sy > 1e-300) ? std::clamp(ss / sy, 1e-6, 1e4) : 1.0;
    if (it % 25 == 0 || it == max_iter - 1) {
      double peak = *std::max_element(p.begin(), p.end());
      double c = 0.0;
      double nsup = 0.0;
      for (std::size_t i = 0; i < k; ++i)
        if (p[i] > 1e-3 * peak) {
          c += g[i];
          nsup += 1.0;
        }
      c /= std::max(nsup, 1.0);
      res = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        if (p[i] > 1e-3 * peak)
          res = std::max(res, std::abs(g[i] - c));
        else
          res = std::max(res, std::max(0.0, c - g[i]));
      }
      if (res < tol) break;
    }
  }
  if (!(res < 10 * tol))
    throw NoConvergence("discretized minimization: Euler-Lagrange residual " +
                        std::to_string(res));
  BoxSolve out;
  out.density.edges.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i) out.density.edges[i] = lo + i * w;
  out.density.values.resize(k);
  for (std::size_t i = 0; i < k; ++i) out.density.values[i] = p[i] / w;
  out.grad = g;
  out.residual = res;
  return out;
}

}  // namespace detail

enum class EquilibriumMethod { analytic_one_cut, discretized_minimization };

inline EquilibriumMeasure solve_equilibrium(
    const Potential& pot, int grid_size = 1024,
    EquilibriumMethod method = EquilibriumMethod::analytic_one_cut) {
  pot.require_confining();
  if (grid_size < 256) throw InvalidArgument("grid_size must be >= 256");

  if (method == EquilibriumMethod::analytic_one_cut) {
    const int ncheb = 64;
    auto ep = detail::solve_endpoints(pot, ncheb);
    std::vector<double> d(ep.a.size() - 1);
    for (std::size_t n = 0; n + 1 < ep.a.size(); ++n) d[n] = ep.a[n + 1] / kPi;
    while (d.size() > 1 && std::abs(d.back()) < 1e-15) d.pop_back();
    // positivity / one-cut check on a fine grid
    double smax = 0.0, smin = std::numeric_limits<double>::infinity();
    for (int i = 1; i < 512; ++i) {
      double u = -1.0 + 2.0 * i / 512.0;
      double s = clenshaw_u(d, u);
      smax = std::max(smax, s);
      smin = std::min(smin, s);
    }
    if (smin < 1e-4 * smax)
      throw MultiCutDetected("density factor S dips to ~0 in the interior");
    std::vector<double> antider = chebyshev_antiderivative(ep.a);
    // c_V = h(center) + V(center); build a provisional measure to get h
    EquilibriumMeasure eq = EquilibriumMeasure::spectral(
        ep.m, ep.r, d, antider, 0.0, pot.label(), grid_size);
    // average h + V over 11 bulk points to damp roundoff
    double c = 0.0;
    double margin = eq.bulk_margin();
    for (int i = 0; i < 11; ++i) {
      double x = (ep.m - ep.r + margin) +
                 (2.0 * ep.r - 2.0 * margin) * i / 10.0;
      c += eq.h(x) + pot.v(x);
    }
    c /= 11.0;
    EquilibriumMeasure out = EquilibriumMeasure::spectral(
        ep.m, ep.r, std::move(d), std::move(antider), c, pot.label(),
        grid_size);
    // The endpoint equations admit spurious one-cut solutions parked in a
    // single well; the equilibrium measure additionally needs zeta_V >= 0
    // off the support. Scan a wide box to catch that.
    double lo = std::min(ep.m - 3.0 * ep.r, -8.0);
    double hi = std::max(ep.m + 3.0 * ep.r, 8.0);
    for (int i = 0; i <= 400; ++i) {
      double x = lo + (hi - lo) * i / 400.0;
      if (std::abs(x - ep.m) <= ep.r) continue;
      if (out.h(x) + pot.v(x) - c < -1e-6)
        throw MultiCutDetected(
            "effective potential negative off support; supply measure data");
    }
    return out;
  }

  // discretized minimization; grow the box until the density detaches
  double m0 = 0.0, best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 2000; ++i) {
    double x = -10.0 + 0.01 * i;
    if (pot.v(x) < best) {
      best = pot.v(x);
      m0 = x;
    }
  }
  double half = 2.0;
  for (int attempt = 0; attempt < 5; ++attempt) {
    auto sol = detail::minimize_on_box(pot, m0 - half, m0 + half,
                                       static_cast<std::size_t>(grid_size));
    double peak =
        *std::max_element(sol.density.values.begin(), sol.density.values.end());
    double edge = std::max(sol.density.values.front(), sol.density.values.back());
    if (edge < 1e-6 * peak) {
      auto intervals = EquilibriumMeasure::extract_support(sol.density);
      // c_V: average of h + V over 11 bulk points
      GridMeasure gm(sol.density);
      double a = intervals.front().a, b = intervals.back().b;
      double margin = 0.25 * (b - a);
      double c = 0.0;
      for (int i = 0; i < 11; ++i) {
        double x = a + margin + (b - a - 2.0 * margin) * i / 10.0;
        c += gm.h(x) + pot.v(x);
      }
      c /= 11.0;
      return EquilibriumMeasure::from_grid(sol.density, c, pot.label());
    }
    half *= 2.0;
  }
  throw NoConvergence("discretized minimization: support never detached from box");
}

// I_V(mu) = 1/2 double log integral + int V dmu, exact cellwise pair part.
inline double energy_functional(const GridDensity& density, const Potential& pot) {
  double mass = density.mass();
  if (std::abs(mass - 1.0) > 1e-6)
    throw NotAProbability("density mass " + std::to_string(mass));
  for (double v : density.values)
    if (v < 0.0) throw NotAProbability("negative density value");
  GridMeasure gm(density);
  double pair = 0.5 * gm.log_energy();
  double ext = 0.0;
  for (std::size_t i = 0; i < density.cells(); ++i)
    ext += density.values[i] *
           integrate_gl([&](double x) { return pot.v(x); }, density.edges[i],
                        density.edges[i + 1], 4);
  return pair + ext;
}

// I_V of the equilibrium measure itself, using h + V = c_V on the support.
inline double equilibrium_energy(const EquilibriumMeasure& eq, const Potential& pot) {
  double vint = eq.integrate([&](double x) { return pot.v(x); });
  return 0.5 * (eq.c_v() + vint);
}

inline double effective_potential(const EquilibriumMeasure& eq,
                                  const Potential& pot, double x) {
  return eq.h(x) + pot.v(x) - eq.c_v();
}

}  // namespace loggas
