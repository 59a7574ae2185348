#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "loggas/electrostatics.hpp"
#include "loggas/equilibrium.hpp"
#include "loggas/fluctuations.hpp"
#include "loggas/io.hpp"
#include "loggas/parallel.hpp"
#include "loggas/sampler.hpp"
#include "loggas/stats.hpp"
#include "loggas/testfunction.hpp"
#include "loggas/transport.hpp"

namespace loggas {

// Pre-registered thresholds: experiments evaluate pass/fail only against
// these, never against anything decided after seeing the data.
inline std::map<std::string, double> default_thresholds() {
  return {{"variance_rel_tol", 0.10}, {"variance_sigmas", 3.0},
          {"mean_sigmas", 3.0},       {"ks_alpha", 0.01},
          {"slope_max", 0.1},         {"envelope_cover", 1.0}};
}

struct ExperimentSpec {
  std::string experiment;  // clt | local-law | uniform | audit
  std::string potential = "quadratic";
  std::vector<double> betas{2.0};
  std::vector<std::size_t> ns{256};
  SamplerKind sampler = SamplerKind::tridiagonal;
  std::size_t replicas = 200;
  double center = 0.0;                 // window / bump center z
  std::vector<double> scales{0.5};     // macroscopic L values
  std::vector<double> scale_exponents; // adds L = N^-alpha per N
  std::vector<double> s_grid;          // uniform experiment s values
  std::vector<double> dyadic_scales{16, 32, 64, 128, 256};  // blown-up L'
  double omega_min = 8.0;              // minimal blown-up scale
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::map<std::string, double> thresholds = default_thresholds();

  double threshold(const std::string& key) const {
    auto it = thresholds.find(key);
    if (it == thresholds.end())
      throw InvalidArgument("unknown threshold key: " + key);
    return it->second;
  }

  Potential make_potential() const {
    if (potential == "quadratic") return Potential::quadratic();
    throw InvalidArgument("potential: only 'quadratic' is built in, got '" +
                          potential + "'");
  }

  // macroscopic scales plus the N^-alpha rules, all checked against the
  // minimal-scale constraint L N > omega_min
  std::vector<double> scales_for(std::size_t n) const {
    std::vector<double> out = scales;
    for (double a : scale_exponents)
      out.push_back(std::pow(static_cast<double>(n), -a));
    for (double l : out)
      if (l * static_cast<double>(n) <= omega_min)
        throw InvalidArgument("scales: L = " + std::to_string(l) +
                              " violates L*N > omega_min at N = " +
                              std::to_string(n));
    return out;
  }

  void validate() const {
    for (double b : betas)
      if (b <= 0.0) throw InvalidArgument("betas: must be positive");
    for (std::size_t n : ns) {
      if (n < 2) throw InvalidArgument("ns: need N >= 2");
      scales_for(n);
    }
    if (replicas < 2) throw InvalidArgument("replicas: need >= 2");
    for (double l : dyadic_scales)
      if (l < omega_min)
        throw InvalidArgument("dyadic_scales: below omega_min");
    make_potential();
  }
};

struct ExperimentReport {
  std::string experiment;
  CsvTable table;
  Json summary;
  bool passed = true;

  void write(const std::filesystem::path& dir) const {
    table.write(dir / "report.csv");
    write_text_atomic(dir / "summary.json", summary.dump(2) + "\n");
  }
};

namespace detail {

// one deterministic replica stream per (beta index, n index)
inline std::uint64_t block_seed(const ExperimentSpec& spec, std::size_t bi,
                                std::size_t ni) {
  return derive_seed(spec.seed, 0x10000ULL * (bi + 1) + ni);
}

inline std::vector<Configuration> draw_replicas(const ExperimentSpec& spec,
                                                double beta, std::size_t n,
                                                std::uint64_t block,
                                                const Potential& pot,
                                                const EquilibriumMeasure& eq) {
  ReplicaSpec rs;
  rs.kind = spec.sampler;
  rs.n = n;
  rs.beta = beta;
  rs.seed = block;
  rs.potential = &pot;
  rs.eq = &eq;
  return sample_replicas(rs, spec.replicas, spec.workers);
}

inline std::vector<double> fluct_values(const std::vector<Configuration>& cfgs,
                                        const TestFunction& xi,
                                        const EquilibriumMeasure& eq,
                                        std::size_t workers) {
  return parallel_map<double>(cfgs.size(), workers, [&](std::size_t k) {
    return fluct(cfgs[k], xi, eq);
  });
}

// empirical log-Laplace transform log E[exp(s F)] over replicas
inline double log_laplace(const std::vector<double>& values, double s) {
  // subtract the max exponent for stability
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, s * v);
  double acc = 0.0;
  for (double v : values) acc += std::exp(s * v - m);
  return m + std::log(acc / static_cast<double>(values.size()));
}

// nonnegative least squares of gap(s) on (|s|, s^2, |s|^3) via projected
// coordinate descent, then scaled so the envelope covers every gap
struct Envelope {
  double a = 0.0, b = 0.0, c = 0.0;
  double eval(double s) const {
    double x = std::abs(s);
    return a * x + b * x * x + c * x * x * x;
  }
};

inline Envelope fit_envelope(const std::vector<double>& s,
                             const std::vector<double>& gap) {
  Envelope e;
  double coef[3] = {0.0, 0.0, 0.0};
  auto basis = [](double si, int j) {
    double x = std::abs(si);
    return j == 0 ? x : (j == 1 ? x * x : x * x * x);
  };
  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int j = 0; j < 3; ++j) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        double r = gap[i];
        for (int k = 0; k < 3; ++k)
          if (k != j) r -= coef[k] * basis(s[i], k);
        num += r * basis(s[i], j);
        den += basis(s[i], j) * basis(s[i], j);
      }
      coef[j] = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    }
  }
  e.a = coef[0];
  e.b = coef[1];
  e.c = coef[2];
  // inflate so the envelope is an actual envelope
  double worst = 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double ev = e.eval(s[i]);
    if (ev > 0.0) worst = std::max(worst, gap[i] / ev);
  }
  e.a *= worst;
  e.b *= worst;
  e.c *= worst;
  return e;
}

inline double gaussian_cdf_matched(double x, const Moments& m) {
  return normal_cdf((x - m.mean) / std::sqrt(std::max(m.variance, 1e-300)));
}

inline Window blown_window(const ExperimentSpec& spec,
                           const EquilibriumMeasure& eq, std::size_t n,
                           double lp, double width_factor = 1.5) {
  double half = 0.5 * width_factor * lp / static_cast<double>(n);
  double margin = 0.1 * eq.bulk_margin();
  if (spec.center - half < eq.support_lo() + margin ||
      spec.center + half > eq.support_hi() - margin)
    throw WindowOutsideBulk("window at scale " + std::to_string(lp) +
                            " leaves the bulk around z = " +
                            std::to_string(spec.center));
  double c = spec.center * static_cast<double>(n);
  double hw = 0.5 * width_factor * lp;
  return Window{c - hw, c + hw, lp};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CLT: fluctuations of rescaled bumps vs the predicted Gaussian
// ---------------------------------------------------------------------------
inline ExperimentReport clt_experiment(const ExperimentSpec& spec) {
  spec.validate();
  auto pot = spec.make_potential();
  auto eq = solve_equilibrium(pot, 1024);
  double theta_norm2 = [] {
    double v = h_half_norm(TestFunction::rescaled_bump(0.0, 1.0));
    return v * v;
  }();

  ExperimentReport rep{
      "clt",
      CsvTable({"beta", "n", "scale", "replicas", "mean", "variance",
                "skewness", "excess_kurtosis", "ks_stat", "ks_p", "jb_p",
                "pred_variance", "pred_mean", "mean_se", "mean_ci_lo",
                "mean_ci_hi", "var_se", "var_ci_lo", "var_ci_hi", "pass"}),
      Json::object(), true};

  std::vector<double> mean_trend;  // |mean| per scale for the mesoscopic check
  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    double beta = spec.betas[bi];
    for (std::size_t ni = 0; ni < spec.ns.size(); ++ni) {
      std::size_t n = spec.ns[ni];
      auto block = detail::block_seed(spec, bi, ni);
      auto cfgs = detail::draw_replicas(spec, beta, n, block, pot, eq);
      auto ls = spec.scales_for(n);
      std::sort(ls.rbegin(), ls.rend());  // large to small for the trend
      for (double l : ls) {
        auto xi = TestFunction::rescaled_bump(spec.center, l);
        auto map = solve_transport(xi, eq, pot);
        auto vals = detail::fluct_values(cfgs, xi, eq, spec.workers);
        Moments m = compute_moments(vals);
        auto ks = ks_test(vals, [&](double x) {
          return detail::gaussian_cdf_matched(x, m);
        });
        auto jb = jarque_bera(vals);
        double pred_var = (2.0 / beta) * theta_norm2;
        double pred_mean =
            (0.5 - 1.0 / beta) *
            eq.integrate([&](double x) { return map.psi_derivative(x, 1); });
        auto mean_ci = bootstrap_ci(
            vals, [](const std::vector<double>& x) {
              return compute_moments(x).mean;
            },
            derive_seed(block, 1));
        auto var_ci = bootstrap_ci(
            vals, [](const std::vector<double>& x) {
              return compute_moments(x).variance;
            },
            derive_seed(block, 2));
        bool pass =
            std::abs(m.variance - pred_var) <
                spec.threshold("variance_rel_tol") * pred_var &&
            std::abs(m.variance - pred_var) <
                spec.threshold("variance_sigmas") * var_ci.se &&
            std::abs(m.mean - pred_mean) <
                spec.threshold("mean_sigmas") * mean_ci.se &&
            ks.p_value > spec.threshold("ks_alpha");
        rep.passed = rep.passed && pass;
        mean_trend.push_back(std::abs(m.mean));
        rep.table.add_row(
            {format_number(beta), std::to_string(n), format_number(l),
             std::to_string(vals.size()), format_number(m.mean),
             format_number(m.variance), format_number(m.skewness),
             format_number(m.excess_kurtosis), format_number(ks.statistic),
             format_number(ks.p_value), format_number(jb.p_value),
             format_number(pred_var), format_number(pred_mean),
             format_number(mean_ci.se), format_number(mean_ci.lo),
             format_number(mean_ci.hi), format_number(var_ci.se),
             format_number(var_ci.lo), format_number(var_ci.hi),
             pass ? "1" : "0"});
      }
    }
  }
  rep.summary = Json{{"experiment", "clt"},
                     {"seed", spec.seed},
                     {"replicas", spec.replicas},
                     {"theta_h_half_sq", theta_norm2},
                     {"thresholds", spec.thresholds},
                     {"passed", rep.passed}};
  return rep;
}

// ---------------------------------------------------------------------------
// Local law: (F^Omega + C0 #)/|Omega| across dyadic blown-up scales
// ---------------------------------------------------------------------------
inline ExperimentReport local_law_experiment(const ExperimentSpec& spec) {
  spec.validate();
  auto pot = spec.make_potential();
  auto eq = solve_equilibrium(pot, 1024);

  ExperimentReport rep{
      "local-law",
      CsvTable({"beta", "n", "scale", "replicas", "c0_emp", "median", "p99",
                "mean", "p99_ci_lo", "p99_ci_hi"}),
      Json::object(), true};

  Json slopes = Json::array();
  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    double beta = spec.betas[bi];
    for (std::size_t ni = 0; ni < spec.ns.size(); ++ni) {
      std::size_t n = spec.ns[ni];
      auto block = detail::block_seed(spec, bi, ni);
      auto cfgs = detail::draw_replicas(spec, beta, n, block, pot, eq);
      auto mu = blow_up(eq, static_cast<double>(n));
      std::vector<Configuration> blown(cfgs.size());
      for (std::size_t k = 0; k < cfgs.size(); ++k) {
        blown[k] = cfgs[k];
        for (auto& x : blown[k].points) x *= static_cast<double>(n);
      }
      // calibrate C0 on a prefix of the replicas at the smallest scale
      double lp0 = *std::min_element(spec.dyadic_scales.begin(),
                                     spec.dyadic_scales.end());
      Window w0 = detail::blown_window(spec, eq, n, lp0);
      std::size_t calib = std::min<std::size_t>(cfgs.size(), 50);
      auto c0s = parallel_map<double>(calib, spec.workers, [&](std::size_t k) {
        auto e = local_energy(blown[k], mu, w0);
        if (e.points_in_window == 0) return 0.0;
        double grad_sq = e.field_integral;
        return (grad_sq - 8.0 * kPi * e.total) /
               (8.0 * kPi * static_cast<double>(e.points_in_window));
      });
      double c0 = 0.0;
      for (double v : c0s) c0 = std::max(c0, v);

      std::vector<double> logl, p99s;
      for (double lp : spec.dyadic_scales) {
        Window w = detail::blown_window(spec, eq, n, lp);
        auto vals =
            parallel_map<double>(cfgs.size(), spec.workers, [&](std::size_t k) {
              auto e = local_energy(blown[k], mu, w);
              return (e.total + c0 * static_cast<double>(e.points_in_window)) /
                     w.length();
            });
        double med = quantile(vals, 0.5), p99 = quantile(vals, 0.99);
        Moments m = compute_moments(vals);
        auto ci = bootstrap_ci(
            vals, [](const std::vector<double>& x) {
              return quantile(x, 0.99);
            },
            derive_seed(block, static_cast<std::uint64_t>(lp)));
        rep.table.add_row({format_number(beta), std::to_string(n),
                           format_number(lp), std::to_string(vals.size()),
                           format_number(c0), format_number(med),
                           format_number(p99), format_number(m.mean),
                           format_number(ci.lo), format_number(ci.hi)});
        logl.push_back(std::log(lp));
        p99s.push_back(p99);
      }
      double slope = logl.size() >= 2 ? fit_slope(logl, p99s) : 0.0;
      bool pass = std::abs(slope) < spec.threshold("slope_max");
      rep.passed = rep.passed && pass;
      slopes.push_back(Json{{"beta", beta},
                            {"n", n},
                            {"c0_emp", c0},
                            {"p99_slope", slope},
                            {"pass", pass}});
    }
  }
  rep.summary = Json{{"experiment", "local-law"},
                     {"seed", spec.seed},
                     {"replicas", spec.replicas},
                     {"slopes", slopes},
                     {"thresholds", spec.thresholds},
                     {"passed", rep.passed}};
  return rep;
}

// ---------------------------------------------------------------------------
// Uniform fluctuations: empirical log-Laplace vs the s^2/beta ||xi||^2 law
// ---------------------------------------------------------------------------
inline ExperimentReport uniform_fluct_experiment(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.s_grid.empty())
    throw InvalidArgument("s_grid: uniform experiment needs s values");
  auto pot = spec.make_potential();
  auto eq = solve_equilibrium(pot, 1024);

  ExperimentReport rep{
      "uniform",
      CsvTable({"beta", "n", "kernel", "scale", "s", "log_laplace",
                "predicted", "gap", "envelope"}),
      Json::object(), true};

  Json fits = Json::array();
  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    double beta = spec.betas[bi];
    for (std::size_t ni = 0; ni < spec.ns.size(); ++ni) {
      std::size_t n = spec.ns[ni];
      auto block = detail::block_seed(spec, bi, ni);
      auto cfgs = detail::draw_replicas(spec, beta, n, block, pot, eq);

      // test functions: rescaled bumps at each scale, plus kappa/zeta
      // kernels at heights from the blown-up scale schedule
      struct Probe {
        std::string kernel;
        double scale;
        TestFunction xi;
      };
      std::vector<Probe> probes;
      for (double l : spec.scales_for(n))
        probes.push_back({"bump", l, TestFunction::rescaled_bump(spec.center, l)});
      for (double lp : spec.dyadic_scales) {
        double h = lp / static_cast<double>(n);
        probes.push_back({"zeta", h, TestFunction::zeta(spec.center, h)});
        probes.push_back({"kappa", h, TestFunction::kappa(spec.center, h)});
      }

      for (const auto& probe : probes) {
        auto vals = detail::fluct_values(cfgs, probe.xi, eq, spec.workers);
        double nrm = std::sqrt(h_half_norm_sq(probe.xi));
        std::vector<double> ss, gaps, emps;
        for (double s : spec.s_grid) {
          double emp = detail::log_laplace(vals, s);
          double pred = s * s / beta * nrm * nrm;
          ss.push_back(s);
          emps.push_back(emp);
          gaps.push_back(std::abs(emp - pred));
        }
        auto env = detail::fit_envelope(ss, gaps);
        for (std::size_t i = 0; i < ss.size(); ++i)
          rep.table.add_row({format_number(beta), std::to_string(n),
                             probe.kernel, format_number(probe.scale),
                             format_number(ss[i]), format_number(emps[i]),
                             format_number(ss[i] * ss[i] / beta * nrm * nrm),
                             format_number(gaps[i]),
                             format_number(env.eval(ss[i]))});
        // curvature consistency: d^2/ds^2 log-Laplace at 0 = variance
        Moments m = compute_moments(vals);
        double curv = std::numeric_limits<double>::quiet_NaN();
        double ds = 0.0;
        for (double s : spec.s_grid) {
          if (s > 0.0 && (ds == 0.0 || s < ds)) ds = s;
        }
        if (ds > 0.0)
          curv = (detail::log_laplace(vals, ds) +
                  detail::log_laplace(vals, -ds)) /
                 (ds * ds);
        fits.push_back(Json{{"beta", beta},
                            {"n", n},
                            {"kernel", probe.kernel},
                            {"scale", probe.scale},
                            {"h_half_sq", nrm * nrm},
                            {"a", env.a},
                            {"b", env.b},
                            {"c", env.c},
                            {"curvature_at_0", curv},
                            {"sample_variance", m.variance}});
      }
    }
  }
  rep.summary = Json{{"experiment", "uniform"},
                     {"seed", spec.seed},
                     {"replicas", spec.replicas},
                     {"fits", fits},
                     {"thresholds", spec.thresholds},
                     {"passed", rep.passed}};
  return rep;
}

// ---------------------------------------------------------------------------
// Inequality audits: per-sample two-sided evaluation of the appendix bounds
// ---------------------------------------------------------------------------
inline ExperimentReport inequality_audit(const ExperimentSpec& spec) {
  spec.validate();
  auto pot = spec.make_potential();
  auto eq = solve_equilibrium(pot, 1024);

  ExperimentReport rep{
      "audit",
      CsvTable({"beta", "n", "audit", "scale", "samples", "max_ratio",
                "median_ratio"}),
      Json::object(), true};

  // density bounds over the windows used below
  Json slopes = Json::array();
  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    double beta = spec.betas[bi];
    for (std::size_t ni = 0; ni < spec.ns.size(); ++ni) {
      std::size_t n = spec.ns[ni];
      double nd = static_cast<double>(n);
      auto block = detail::block_seed(spec, bi, ni);
      auto cfgs = detail::draw_replicas(spec, beta, n, block, pot, eq);
      auto mu = blow_up(eq, nd);
      std::vector<Configuration> blown(cfgs.size());
      for (std::size_t k = 0; k < cfgs.size(); ++k) {
        blown[k] = cfgs[k];
        for (auto& x : blown[k].points) x *= nd;
      }
      double lambda_sup = eq.density(spec.center);  // local density bound

      std::map<std::string, std::vector<std::pair<double, double>>> trend;
      auto emit = [&](const std::string& audit, double scale,
                      std::vector<double> ratios) {
        if (ratios.empty()) return;
        double mx = *std::max_element(ratios.begin(), ratios.end());
        rep.table.add_row({format_number(beta), std::to_string(n), audit,
                           format_number(scale), std::to_string(ratios.size()),
                           format_number(mx),
                           format_number(quantile(ratios, 0.5))});
        if (mx > 0.0) trend[audit].push_back({std::log(scale), std::log(mx)});
      };

      for (double lp : spec.dyadic_scales) {
        Window w = detail::blown_window(spec, eq, n, lp);
        Window w2{2.0 * w.lo - 0.5 * (w.lo + w.hi),
                  2.0 * w.hi - 0.5 * (w.lo + w.hi), lp};  // doubled window
        auto rows = parallel_map<std::array<double, 4>>(
            cfgs.size(), spec.workers, [&](std::size_t k) {
              std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
              auto e = local_energy(blown[k], mu, w);
              double grad = e.field_integral;
              double cnt = static_cast<double>(e.points_in_window);
              // discrepancy estimate (window B_L, field over B_2L)
              double d = discrepancy(blown[k], mu, w.lo, w.hi);
              if (std::abs(d) > 4.0 * lambda_sup && grad > 0.0) {
                auto e2 = local_energy(blown[k], mu, w2);
                double lhs =
                    d * d * std::min(1.0, std::sqrt(std::abs(d) / w.length()));
                out[0] = lhs / e2.field_integral;
              }
              // energy estimate: zeta bump inside Omega, 1-neighborhood slack
              double half = 0.5 * w.length() - 1.0;
              auto z = TestFunction::rescaled_bump(0.5 * (w.lo + w.hi), half);
              double lhs = 0.0;
              for (double x : blown[k].points) lhs += z(x);
              lhs -= integrate_adaptive(
                  [&](double x) { return z(x) * mu.density(x); }, z.support_lo,
                  z.support_hi, 1e-9);
              double zp_sup = z.c_norm(1, 801);
              double zp_l2 = std::sqrt(integrate_adaptive(
                  [&](double x) {
                    double v = z.derivative(x, 1);
                    return v * v;
                  },
                  z.support_lo, z.support_hi, 1e-9));
              double z_l2 = std::sqrt(integrate_adaptive(
                  [&](double x) { return z(x) * z(x); }, z.support_lo,
                  z.support_hi, 1e-9));
              double hfrak = 0.25 * w.length();
              double gnorm = std::sqrt(std::max(grad, 0.0));
              double rhs = zp_sup * (w.length() +
                                     std::pow(w.length(), 0.25) * gnorm) +
                           (std::sqrt(hfrak) * zp_l2 + z_l2 / std::sqrt(hfrak)) *
                               gnorm;
              out[1] = std::abs(lhs) / rhs;
              // local energy control: two empirical constants
              if (cnt > 0.0) {
                out[2] = (grad - 8.0 * kPi * e.total) / cnt;
                out[3] = (e.self_energy_sum - 2.0 * e.total) / cnt;
              }
              return out;
            });
        std::vector<double> r0, r1, r2, r3;
        for (const auto& r : rows) {
          if (r[0] > 0.0) r0.push_back(r[0]);
          r1.push_back(r[1]);
          r2.push_back(r[2]);
          r3.push_back(r[3]);
        }
        emit("discrepancy", lp, r0);
        emit("energy-estimate", lp, r1);
        emit("field-control", lp, r2);
        emit("self-energy-control", lp, r3);
      }

      // rough L^1 bound at unblown scales
      for (double l : spec.scales_for(n)) {
        auto xi = TestFunction::rescaled_bump(spec.center, 0.5 * l);
        double sup = xi.c_norm(0, 801);
        auto vals = detail::fluct_values(cfgs, xi, eq, spec.workers);
        std::vector<double> ratios(vals.size());
        for (std::size_t k = 0; k < vals.size(); ++k)
          ratios[k] = std::abs(vals[k]) / (nd * l * sup);
        emit("rough-l1", l, ratios);
      }

      // moment audit against the uniform-fluct envelope constants
      {
        double l = spec.scales_for(n).front();
        auto xi = TestFunction::rescaled_bump(spec.center, l);
        auto vals = detail::fluct_values(cfgs, xi, eq, spec.workers);
        double nrm = h_half_norm(xi);
        std::vector<double> ss, gaps;
        for (double s : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
          ss.push_back(s);
          gaps.push_back(std::abs(detail::log_laplace(vals, s) -
                                  s * s / beta * nrm * nrm));
        }
        auto env = detail::fit_envelope(ss, gaps);
        double a = std::max(env.a, 1e-6), b = std::max(env.b + nrm * nrm / beta, 1e-6),
               c = std::max(env.c, 1e-6);
        std::vector<double> ratios;
        for (int k = 1; k <= 6; ++k) {
          double mom = 0.0;
          for (double v : vals) mom += std::pow(std::abs(v), k);
          mom /= static_cast<double>(vals.size());
          // moment envelope shape: a^k + b^{k/2} + c^{k/3} with constants
          // absorbed into the reported ratio
          double envv = std::pow(a, k) + std::pow(b, 0.5 * k) +
                        std::pow(c, k / 3.0);
          ratios.push_back(mom / envv);
          emit("moment-k" + std::to_string(k), l, {mom / envv});
        }
      }

      for (const auto& [audit, pts] : trend) {
        if (pts.size() < 2) continue;
        std::vector<double> xs, ys;
        for (auto [x, y] : pts) {
          xs.push_back(x);
          ys.push_back(y);
        }
        double slope = fit_slope(xs, ys);
        // stability in the audited constant means the max ratio does not
        // grow with scale; negative slopes (improving) are fine
        bool pass = slope < spec.threshold("slope_max");
        if (audit.rfind("moment-", 0) == 0) pass = true;  // single scale
        rep.passed = rep.passed && pass;
        slopes.push_back(Json{{"beta", beta},
                              {"n", n},
                              {"audit", audit},
                              {"log_slope", slope},
                              {"pass", pass}});
      }
    }
  }
  rep.summary = Json{{"experiment", "audit"},
                     {"seed", spec.seed},
                     {"replicas", spec.replicas},
                     {"slopes", slopes},
                     {"thresholds", spec.thresholds},
                     {"passed", rep.passed}};
  return rep;
}

}  // namespace loggas
