#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "loggas/errors.hpp"
#include "loggas/measure.hpp"
#include "loggas/quadrature.hpp"
#include "loggas/sampler.hpp"

namespace loggas {

struct TruncationVector {
  std::vector<double> eta;
};

// r_i = 1/4 min(min_{j!=i} |x_i-x_j|, 1); empty inner min counts as 1.
inline TruncationVector minimal_distances(const Configuration& config) {
  const auto& x = config.points;
  TruncationVector out;
  out.eta.resize(x.size(), 0.25);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double gap = 1.0;
    if (i > 0) gap = std::min(gap, x[i] - x[i - 1]);
    if (i + 1 < x.size()) gap = std::min(gap, x[i + 1] - x[i]);
    out.eta[i] = 0.25 * gap;
  }
  return out;
}

struct Window {
  double lo = 0.0, hi = 0.0;
  double height = 0.0;  // extension half-height L: Omega x [-L, L]

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

// Neighbor gaps restricted to points inside Omega; points within 1/2 of the
// boundary get the capped value 1/4.
inline TruncationVector local_minimal_distances(const Configuration& config,
                                                const Window& window) {
  const auto& x = config.points;
  TruncationVector out;
  out.eta.resize(x.size(), 0.25);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double bd = std::min(std::abs(x[i] - window.lo), std::abs(x[i] - window.hi));
    if (window.contains(x[i]) && bd < 0.5) continue;  // boundary rule: 1/4
    double gap = 1.0;
    for (std::size_t j = i; j-- > 0;) {
      if (!window.contains(x[j])) continue;
      gap = std::min(gap, x[i] - x[j]);
      break;
    }
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (!window.contains(x[j])) continue;
      gap = std::min(gap, x[j] - x[i]);
      break;
    }
    out.eta[i] = 0.25 * gap;
  }
  return out;
}

// f_eta(x) = (-log|x| + log eta)_+ ; +inf at x = 0 by convention.
inline double truncation_function(double eta, double x) {
  if (eta <= 0.0) throw InvalidArgument("truncation_function: eta must be > 0");
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(0.0, -std::log(std::abs(x)) + std::log(eta));
}

struct EnergyBreakdown {
  // sum form
  double pair_sum = 0.0;         // sum_{i != j} g(x_i - x_j)
  double cross_term = 0.0;       // -2 sum_i h^mu(x_i)
  double background_term = 0.0;  // double log integral of mu
  // field form
  double field_integral = 0.0;   // int |grad u_eta|^2 over the region
  double self_energy_sum = 0.0;  // sum g(eta_i)
  double f_correction = 0.0;     // sum_i int f_{eta_i}(x - x_i) dmu
  double tail_estimate = 0.0;    // dipole estimate of the truncated tail
  std::size_t points_in_window = 0;
  double total = 0.0;
};

// F(X, mu) = 1/2 [ sum_{i!=j} g - 2 sum h^mu(x_i) + int int g dmu dmu ].
inline EnergyBreakdown next_order_energy(const Configuration& config,
                                         const Measure1D& mu) {
  const auto& x = config.points;
  const double n = static_cast<double>(x.size());
  if (std::abs(mu.mass() - n) > 1e-6 * std::max(1.0, n))
    throw MassMismatch("measure mass " + std::to_string(mu.mass()) +
                       " vs N = " + std::to_string(x.size()));
  EnergyBreakdown out;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      double gap = std::abs(x[i] - x[j]);
      if (gap == 0.0) throw CoincidentPoints("zero gap in configuration");
      out.pair_sum -= 2.0 * std::log(gap);
    }
  for (double xi : x) out.cross_term -= 2.0 * mu.h(xi);
  out.background_term = mu.log_energy();
  out.total = 0.5 * (out.pair_sum + out.cross_term + out.background_term);
  return out;
}

// F_N(X_N, mu_V) = F(X', mu') - (N/2) log N with X' = N X, mu' the blow-up.
inline double next_order_energy_unblown(const Configuration& config,
                                        const EquilibriumMeasure& eq) {
  const double n = static_cast<double>(config.points.size());
  Configuration blown = config;
  for (auto& xi : blown.points) xi *= n;
  auto mu = blow_up(eq, n);
  return next_order_energy(blown, mu).total - 0.5 * n * std::log(n);
}

// H_N(X) - [N^2 I_V(mu_V) + N sum zeta_V(x_i) + F_N(X, mu_V)]
inline double splitting_check(const Configuration& config, const Potential& pot,
                              const EquilibriumMeasure& eq) {
  const auto& x = config.points;
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      h -= std::log(std::abs(x[i] - x[j]));
  for (double xi : x) h += n * pot.v(xi);
  double zeta_sum = 0.0;
  for (double xi : x) zeta_sum += effective_potential(eq, pot, xi);
  double rhs = n * n * equilibrium_energy(eq, pot) + n * zeta_sum +
               next_order_energy_unblown(config, eq);
  return h - rhs;
}

// #(X in [lo,hi]) - mu([lo,hi])
inline double measure_mass(const Measure1D& mu, double lo, double hi) {
  lo = std::max(lo, mu.support_lo());
  hi = std::min(hi, mu.support_hi());
  if (hi <= lo) return 0.0;
  return integrate_adaptive([&](double y) { return mu.density(y); }, lo, hi,
                            1e-10);
}

inline double discrepancy(const Configuration& config, const Measure1D& mu,
                          double lo, double hi) {
  double count = 0.0;
  for (double xi : config.points)
    if (xi >= lo && xi <= hi) count += 1.0;
  return count - measure_mass(mu, lo, hi);
}

// ---------------------------------------------------------------------------
// Point-field treecode: S(z) = sum_i 1/(z - x_i) with optional per-charge
// truncation (charges whose disk contains z are dropped). Far nodes use a
// scaled multipole (Laurent) expansion; accuracy ~ (1/3)^order.

class PointFieldTree {
 public:
  static constexpr int kOrder = 26;
  static constexpr std::size_t kLeaf = 16;

  PointFieldTree(const std::vector<double>& sorted_x,
                 const std::vector<double>& eta, bool use_tree)
      : x_(sorted_x), eta_(eta), use_tree_(use_tree) {
    if (!eta_.empty() && eta_.size() != x_.size())
      throw InvalidArgument("truncation vector size mismatch");
    if (use_tree_ && !x_.empty()) build(0, x_.size());
  }

  std::complex<double> sum(std::complex<double> z, bool truncated) const {
    if (x_.empty()) return {0.0, 0.0};
    if (!use_tree_) return direct(z, 0, x_.size(), truncated);
    return eval(0, z, truncated);
  }

 private:
  struct Node {
    std::size_t lo, hi;
    double center, half_width, eta_max;
    double moments[kOrder];  // scaled: sum ((x_i - c)/hw)^k
    int left = -1, right = -1;
  };

  int build(std::size_t lo, std::size_t hi) {
    Node nd;
    nd.lo = lo;
    nd.hi = hi;
    double xmin = x_[lo], xmax = x_[hi - 1];
    nd.center = 0.5 * (xmin + xmax);
    nd.half_width = std::max(0.5 * (xmax - xmin), 1e-300);
    nd.eta_max = 0.0;
    if (!eta_.empty())
      for (std::size_t i = lo; i < hi; ++i)
        nd.eta_max = std::max(nd.eta_max, eta_[i]);
    for (int k = 0; k < kOrder; ++k) nd.moments[k] = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      double u = (x_[i] - nd.center) / nd.half_width, p = 1.0;
      for (int k = 0; k < kOrder; ++k) {
        nd.moments[k] += p;
        p *= u;
      }
    }
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(nd);
    if (hi - lo > kLeaf) {
      std::size_t mid = lo + (hi - lo) / 2;
      int l = build(lo, mid);
      int r = build(mid, hi);
      nodes_[id].left = l;
      nodes_[id].right = r;
    }
    return id;
  }

  std::complex<double> direct(std::complex<double> z, std::size_t lo,
                              std::size_t hi, bool truncated) const {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = lo; i < hi; ++i) {
      std::complex<double> d = z - x_[i];
      double r2 = std::norm(d);
      if (truncated && !eta_.empty() && eta_[i] > 0.0 &&
          r2 <= eta_[i] * eta_[i])
        continue;
      if (r2 == 0.0)
        throw SingularEvaluation("field evaluated at an untruncated charge");
      s += std::conj(d) / r2;
    }
    return s;
  }

  std::complex<double> eval(int id, std::complex<double> z, bool truncated) const {
    const Node& nd = nodes_[id];
    double dx = 0.0;
    double xr = z.real();
    double xmin = nd.center - nd.half_width, xmax = nd.center + nd.half_width;
    if (xr < xmin) dx = xmin - xr;
    else if (xr > xmax) dx = xr - xmax;
    double dist = std::hypot(dx, z.imag());
    if (dist > std::max(3.0 * nd.half_width, 4.0 * nd.eta_max)) {
      std::complex<double> zc = z - nd.center;
      std::complex<double> u = nd.half_width / zc;
      std::complex<double> acc{0.0, 0.0};
      for (int k = kOrder - 1; k >= 0; --k) acc = acc * u + nd.moments[k];
      return acc / zc;
    }
    if (nd.left < 0) return direct(z, nd.lo, nd.hi, truncated);
    return eval(nd.left, z, truncated) + eval(nd.right, z, truncated);
  }

  std::vector<double> x_;
  std::vector<double> eta_;
  bool use_tree_;
  std::vector<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Truncated electric field grad u_eta. With z = x + i y,
//   grad u(X) = ( Re D, -Im D ),  D = C(z) - S(z),
// where C is the Stieltjes transform of mu and S the (truncated) point sum.

struct FieldQuadratureOptions {
  double growth = 0.5;       // panel size <= growth * distance to singularities
  double floor_panel = 1e-3; // never refine targets below this size
  int gl_order = 4;          // tensor Gauss-Legendre order per leaf
  double refine = 1.0;       // multiply all targets (for convergence studies)
  int max_depth = 48;
};

class FieldEvaluator {
 public:
  FieldEvaluator(const Configuration& config, const Measure1D& mu,
                 TruncationVector truncation)
      : mu_(&mu),
        points_(config.points),
        eta_(std::move(truncation.eta)),
        tree_(points_, eta_, points_.size() > 200) {}

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& eta() const { return eta_; }

  std::complex<double> difference(std::complex<double> z) const {
    return mu_->stieltjes(z) - tree_.sum(z, true);
  }

  std::pair<double, double> grad(double x, double y) const {
    auto d = difference({x, y});
    return {d.real(), -d.imag()};
  }

  double energy_density(std::complex<double> z) const {
    return std::norm(difference(z));
  }

  // field with charge i removed entirely (smooth inside its disk square)
  std::complex<double> difference_excluding(std::complex<double> z,
                                            std::size_t i) const {
    return mu_->stieltjes(z) - tree_.sum(z, false) +
           1.0 / (z - points_[i]);
  }

  const Measure1D& measure() const { return *mu_; }

 private:
  const Measure1D* mu_;
  std::vector<double> points_;
  std::vector<double> eta_;
  PointFieldTree tree_;
};

inline std::pair<double, double> electric_field(const Configuration& config,
                                                const Measure1D& mu,
                                                double x, double y,
                                                const TruncationVector& trunc) {
  FieldEvaluator ev(config, mu, trunc);
  return ev.grad(x, y);
}

// ---------------------------------------------------------------------------
// Field-energy quadrature over a symmetric region [x0,x1] x [-y1,y1].
//
// Truncation disks fully inside the region are handled semi-analytically on
// the square Q_i = [x_i-eta, x_i+eta] x [-eta, eta]:
//   int_{Q} |grad u|^2 = int_{Q} |F_i|^2  +  K_sq - 2(4-pi) eta^2 Re F_i'(x_i)
// with F_i the field with charge i removed (smooth across Q off the axis) and
// K_sq = int_{square(1) \ disk(1)} r^{-2} dA, a pure constant. Disks cut by
// the region boundary fall back to geometric panel refinement.

namespace detail {

inline double square_minus_disk_constant() {
  static const double k =
      8.0 * integrate_adaptive(
                [](double th) { return -std::log(std::cos(th)); }, 0.0,
                kPi / 4.0, 1e-13);
  return k;
}

struct DiskSquare {
  double x, eta;
  std::size_t index;
};

class FieldEnergyIntegrator {
 public:
  FieldEnergyIntegrator(const FieldEvaluator& ev, FieldQuadratureOptions opts)
      : ev_(ev), opts_(opts), rule_(gauss_legendre(opts.gl_order)) {}

  // full integral over [x0,x1] x [-y1,y1]
  double run(double x0, double x1, double y1) {
    analytic_.clear();
    geometric_.clear();
    const auto& xs = ev_.points();
    const auto& eta = ev_.eta();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (eta.empty() || eta[i] <= 0.0) continue;
      double e = eta[i];
      bool touches = xs[i] + e > x0 && xs[i] - e < x1 && e > -y1;
      if (!touches) continue;
      bool inside = xs[i] - e >= x0 && xs[i] + e <= x1 && e <= y1;
      if (inside)
        analytic_.push_back({xs[i], e, i});
      else
        geometric_.push_back({xs[i], e, i});
    }
    double total = 0.0;
    for (const auto& d : analytic_)
      total += square_minus_disk_constant() + cross_term(d);
    total += 2.0 * recurse(x0, x1, 0.0, y1, 0);
    return total;
  }

 private:
  // -2 int_{Q \ disk} Re(F conj(1/(z - x_i))) dA with F the charge-free
  // field. The reflection symmetry of the field folds it onto the upper
  // half; in polar coordinates around the charge the area element cancels
  // the kernel, leaving -4 int_0^pi int_eta^{R(theta)} Re(F e^{i theta}).
  double cross_term(const DiskSquare& d) const {
    static const QuadratureRule gl = gauss_legendre(8);
    double s = 0.0;
    for (int seg = 0; seg < 4; ++seg) {
      double t0 = seg * kPi / 4.0, t1 = t0 + kPi / 4.0;
      for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
        double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gl.nodes[a];
        double rmax = d.eta / std::max(std::abs(std::cos(th)),
                                       std::abs(std::sin(th)));
        std::complex<double> dir(std::cos(th), std::sin(th));
        double inner = 0.0;
        for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
          double r = 0.5 * (d.eta + rmax) +
                     0.5 * (rmax - d.eta) * gl.nodes[b];
          std::complex<double> z = d.x + r * dir;
          inner += gl.weights[b] *
                   (ev_.difference_excluding(z, d.index) * dir).real();
        }
        s += gl.weights[a] * inner * 0.5 * (rmax - d.eta) * 0.5 * (t1 - t0);
      }
    }
    return -4.0 * s;
  }

  double leaf(double x0, double x1, double y0, double y1,
              int exclude_index) const {
    double sx = 0.5 * (x1 - x0), sy = 0.5 * (y1 - y0);
    double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    double s = 0.0;
    for (std::size_t a = 0; a < rule_.nodes.size(); ++a)
      for (std::size_t b = 0; b < rule_.nodes.size(); ++b) {
        std::complex<double> z(cx + sx * rule_.nodes[a],
                               cy + sy * rule_.nodes[b]);
        double val = exclude_index >= 0
                         ? std::norm(ev_.difference_excluding(
                               z, static_cast<std::size_t>(exclude_index)))
                         : ev_.energy_density(z);
        s += rule_.weights[a] * rule_.weights[b] * val;
      }
    return s * sx * sy;
  }

  double split(double x0, double x1, double y0, double y1, int depth) const {
    if (x1 - x0 >= y1 - y0) {
      double mid = 0.5 * (x0 + x1);
      return recurse(x0, mid, y0, y1, depth + 1) +
             recurse(mid, x1, y0, y1, depth + 1);
    }
    double mid = 0.5 * (y0 + y1);
    return recurse(x0, x1, y0, mid, depth + 1) +
           recurse(x0, x1, mid, y1, depth + 1);
  }

  double recurse(double x0, double x1, double y0, double y1, int depth) const {
    double w = x1 - x0, h = y1 - y0;
    if (w <= 0.0 || h <= 0.0) return 0.0;
    // inside an analytic square: smooth charge-free integrand
    for (const auto& d : analytic_) {
      double qx0 = d.x - d.eta, qx1 = d.x + d.eta, qy1 = d.eta;
      if (qx1 <= x0 || qx0 >= x1 || qy1 <= y0) continue;
      if (x0 >= qx0 && x1 <= qx1 && y1 <= qy1 + 1e-12) {
        if (std::max(w, h) > opts_.refine * d.eta && depth < opts_.max_depth)
          return split(x0, x1, y0, y1, depth);
        return leaf(x0, x1, y0, y1, static_cast<int>(d.index));
      }
    }
    // geometric disks: refine panels straddling the circle
    bool straddles = false;
    double eta_geo = 0.0;
    for (const auto& d : geometric_) {
      double rx = std::max({x0 - d.x, d.x - x1, 0.0});
      double ry = std::max(y0, 0.0);
      double near2 = rx * rx + ry * ry;
      double fx = std::max(std::abs(x0 - d.x), std::abs(x1 - d.x));
      double fy = std::max(std::abs(y0), std::abs(y1));
      double far2 = fx * fx + fy * fy;
      if (near2 < d.eta * d.eta && far2 > d.eta * d.eta) {
        straddles = true;
        eta_geo = std::max(eta_geo, d.eta);
      }
    }
    // resolve the field at the scale of the distance to the nearest charge
    const auto& xs = ev_.points();
    const auto& etas = ev_.eta();
    double dist = std::abs(y0) + 1.0;
    if (!xs.empty()) {
      auto it = std::lower_bound(xs.begin(), xs.end(), x0);
      std::size_t cand[2];
      std::size_t ncand = 0;
      if (it != xs.end()) cand[ncand++] = static_cast<std::size_t>(it - xs.begin());
      if (it != xs.begin())
        cand[ncand++] = static_cast<std::size_t>(it - xs.begin()) - 1;
      dist = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < ncand; ++c) {
        std::size_t j = cand[c];
        double ddx = std::max({x0 - xs[j], xs[j] - x1, 0.0});
        double d = std::hypot(ddx, y0);
        // a truncated charge is smooth at the scale of its own radius
        if (!etas.empty()) d = std::max(d, 0.8 * etas[j]);
        dist = std::min(dist, d);
      }
    }
    double target =
        opts_.refine * std::max(opts_.growth * dist, opts_.floor_panel);
    if (straddles) target = std::min(target, eta_geo / 16.0);
    if (std::max(w, h) > target && depth < opts_.max_depth)
      return split(x0, x1, y0, y1, depth);
    // small rect overlapping an analytic square: exact cuts at its edges
    for (const auto& d : analytic_) {
      double qx0 = d.x - d.eta, qx1 = d.x + d.eta, qy1 = d.eta;
      if (qx1 <= x0 || qx0 >= x1 || qy1 <= y0) continue;
      for (double cut : {qx0, qx1})
        if (cut > x0 + 1e-12 && cut < x1 - 1e-12)
          return recurse(x0, cut, y0, y1, depth + 1) +
                 recurse(cut, x1, y0, y1, depth + 1);
      if (qy1 > y0 + 1e-12 && qy1 < y1 - 1e-12)
        return recurse(x0, x1, y0, qy1, depth + 1) +
               recurse(x0, x1, qy1, y1, depth + 1);
      // residual sliver inside the square's footprint
      if (x0 >= qx0 - 1e-12 && x1 <= qx1 + 1e-12 && y0 < qy1)
        return leaf(x0, x1, y0, y1, static_cast<int>(d.index));
    }
    return leaf(x0, x1, y0, y1, -1);
  }

  const FieldEvaluator& ev_;
  FieldQuadratureOptions opts_;
  QuadratureRule rule_;
  std::vector<DiskSquare> analytic_;
  std::vector<DiskSquare> geometric_;
};

// sum_i int f_{eta_i}(x - x_i) dmu(x), log singularity kept integrable by
// splitting at the charge.
inline double f_corrections(const Measure1D& mu, const std::vector<double>& xs,
                            const std::vector<double>& eta,
                            const std::vector<std::size_t>& which) {
  double s = 0.0;
  for (std::size_t i : which) {
    double e = eta[i], c = xs[i];
    auto f = [&](double x) {
      return (-std::log(std::abs(x - c)) + std::log(e)) * mu.density(x);
    };
    double tiny = 1e-12 * e;
    s += integrate_adaptive(f, c - e, c - tiny, 1e-11) +
         integrate_adaptive(f, c + tiny, c + e, 1e-11);
  }
  return s;
}

}  // namespace detail

// Whole-plane renormalized energy in field form over the box [-R,R]^2 with a
// dipole estimate for the exterior. Matches next_order_energy (electrical
// view is an identity).
inline EnergyBreakdown renormalized_energy_field_form(
    const Configuration& config, const Measure1D& mu,
    const TruncationVector& truncation, double box_radius,
    FieldQuadratureOptions opts = {}) {
  auto rvec = minimal_distances(config);
  for (std::size_t i = 0; i < config.points.size(); ++i)
    if (truncation.eta[i] > rvec.eta[i] * (1.0 + 1e-12))
      throw TruncationTooLarge("eta_" + std::to_string(i) +
                               " exceeds the minimal distance");
  FieldEvaluator ev(config, mu, truncation);
  detail::FieldEnergyIntegrator integ(ev, opts);
  EnergyBreakdown out;
  out.field_integral =
      integ.run(-box_radius, box_radius, box_radius);
  for (double e : truncation.eta) out.self_energy_sum += -std::log(e);
  std::vector<std::size_t> all(config.points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  out.f_correction =
      detail::f_corrections(mu, config.points, truncation.eta, all);
  // dipole tail: p = sum x_i - int x dmu, exterior energy ~ pi p^2 / R^2
  double p = 0.0;
  for (double xi : config.points) p += xi;
  p -= mu.integrate([](double y) { return y; });
  out.tail_estimate = kPi * p * p / (box_radius * box_radius) / (4.0 * kPi);
  out.total = (out.field_integral - 2.0 * kPi * out.self_energy_sum) /
                  (4.0 * kPi) -
              out.f_correction + out.tail_estimate;
  out.points_in_window = config.points.size();
  return out;
}

// True local energy F^Omega over Omega x [-L, L] with the local minimal
// distance truncation; self-energy and f-corrections count x_i in Omega only.
inline EnergyBreakdown local_energy(const Configuration& config,
                                    const Measure1D& mu, const Window& window,
                                    FieldQuadratureOptions opts = {}) {
  TruncationVector rt = local_minimal_distances(config, window);
  double rmax = 0.0;
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < config.points.size(); ++i)
    if (window.contains(config.points[i])) {
      inside.push_back(i);
      rmax = std::max(rmax, rt.eta[i]);
    }
  if (window.height < rmax)
    throw WindowTooThin("extension height below the largest truncation radius");
  FieldEvaluator ev(config, mu, rt);
  detail::FieldEnergyIntegrator integ(ev, opts);
  EnergyBreakdown out;
  out.field_integral = integ.run(window.lo, window.hi, window.height);
  for (std::size_t i : inside) out.self_energy_sum += -std::log(rt.eta[i]);
  out.f_correction = detail::f_corrections(mu, config.points, rt.eta, inside);
  out.points_in_window = inside.size();
  out.total = (out.field_integral - 2.0 * kPi * out.self_energy_sum) /
                  (4.0 * kPi) -
              out.f_correction;
  return out;
}

}  // namespace loggas
