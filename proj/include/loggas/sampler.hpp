#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loggas/equilibrium.hpp"
#include "loggas/errors.hpp"
#include "loggas/parallel.hpp"
#include "loggas/potential.hpp"
#include "loggas/rng.hpp"
#include "loggas/tridiagonal.hpp"

namespace loggas {

struct Provenance {
  std::string sampler_id;
  std::uint64_t seed = 0;
  std::uint64_t steps = 0;
  double acceptance_rate = 0.0;
};

struct Configuration {
  std::vector<double> points;  // sorted ascending, strictly increasing
  std::size_t n = 0;
  double beta = 0.0;
  Provenance provenance;

  void finalize() {
    std::sort(points.begin(), points.end());
    n = points.size();
    for (std::size_t i = 1; i < n; ++i)
      if (points[i] == points[i - 1])
        throw CoincidentPoints("coincident points at index " + std::to_string(i));
  }
};

// -beta * H with H = sum_{i<j} -log|x_i - x_j| + N sum_i V(x_i)
inline double log_density_unnormalized(const Configuration& config,
                                       const Potential& pot) {
  const auto& x = config.points;
  const std::size_t n = x.size();
  double hpair = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double gap = std::abs(x[i] - x[j]);
      if (gap == 0.0) throw CoincidentPoints("zero gap in configuration");
      hpair -= std::log(gap);
    }
  double hext = 0.0;
  for (double xi : x) hext += pot.v(xi);
  return -config.beta * (hpair + static_cast<double>(n) * hext);
}

// beta-Hermite tridiagonal model: diagonal N(0,1), off-diagonal
// chi_{beta(n-k)}/sqrt(2); eigenvalues carry the weight
// exp(-1/2 sum l^2) prod|l_i-l_j|^beta, so x = l / sqrt(2 beta N) matches
// exp(-beta N sum x^2) prod|x_i-x_j|^beta.
inline Configuration sample_tridiagonal(std::size_t n, double beta,
                                        std::uint64_t seed) {
  if (beta <= 0.0) throw InvalidBeta("beta must be positive");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  Rng rng(seed);
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) diag[i] = rng.gaussian();
  for (std::size_t i = 0; i + 1 < n; ++i)
    off[i] = rng.chi(beta * static_cast<double>(n - 1 - i)) / std::sqrt(2.0);
  std::vector<double> lambda = tridiagonal_eigenvalues(diag, off);
  const double scale = 1.0 / std::sqrt(2.0 * beta * static_cast<double>(n));
  Configuration cfg;
  cfg.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) cfg.points[i] = scale * lambda[i];
  cfg.beta = beta;
  cfg.provenance = {"tridiagonal", seed, n, 1.0};
  cfg.finalize();
  return cfg;
}

struct McmcParams {
  std::size_t sweeps = 0;      // total sweeps including burn-in
  std::size_t burn_in = 0;
  double proposal_sigma = 0.0;  // 0 -> auto (1/n)
  double target_acceptance = 0.35;

  void validate(std::size_t n) const {
    if (sweeps < 1) throw InvalidArgument("sweeps must be >= 1");
    if (sweeps < burn_in) throw NotBurnedIn("sweeps < burn_in");
    if (target_acceptance <= 0.0 || target_acceptance >= 1.0)
      throw InvalidArgument("target_acceptance must be in (0,1)");
    (void)n;
  }
  static McmcParams defaults(std::size_t n) {
    McmcParams p;
    p.burn_in = 100 * n;
    p.sweeps = p.burn_in + 200 * n;
    return p;
  }
};

namespace detail {

// Inverse-CDF draw positions from the equilibrium density.
inline std::vector<double> equilibrium_quantiles(const EquilibriumMeasure& eq,
                                                 std::size_t n, Rng& rng) {
  const double a = eq.support_lo(), b = eq.support_hi();
  const int grid = 4096;
  std::vector<double> cdf(grid + 1, 0.0), xs(grid + 1);
  for (int i = 0; i <= grid; ++i) xs[i] = a + (b - a) * i / grid;
  for (int i = 1; i <= grid; ++i) {
    double mid = 0.5 * (xs[i - 1] + xs[i]);
    cdf[i] = cdf[i - 1] + eq.density(mid) * (xs[i] - xs[i - 1]);
  }
  for (auto& c : cdf) c /= cdf[grid];
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(n);
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::size_t i = std::min<std::size_t>(cdf.size() - 1,
        std::max<std::size_t>(1, static_cast<std::size_t>(it - cdf.begin())));
    double frac = (u - cdf[i - 1]) / std::max(1e-300, cdf[i] - cdf[i - 1]);
    out[k] = xs[i - 1] + frac * (xs[i] - xs[i - 1]);
  }
  return out;
}

}  // namespace detail

// Single-site Metropolis with Gaussian proposals; O(N) per site move.
inline Configuration sample_mcmc(const Potential& pot, std::size_t n,
                                 double beta, std::uint64_t seed,
                                 McmcParams params,
                                 const EquilibriumMeasure* eq_hint = nullptr) {
  if (beta <= 0.0) throw InvalidBeta("beta must be positive");
  if (n < 1) throw InvalidArgument("n must be >= 1");
  params.validate(n);
  Rng rng(seed);

  std::optional<EquilibriumMeasure> owned;
  const EquilibriumMeasure* eq = eq_hint;
  if (!eq) {
    owned = solve_equilibrium(pot, 512);
    eq = &*owned;
  }
  std::vector<double> x = detail::equilibrium_quantiles(*eq, n, rng);
  std::sort(x.begin(), x.end());

  double sigma = params.proposal_sigma > 0.0
                     ? params.proposal_sigma
                     : (eq->support_hi() - eq->support_lo()) / static_cast<double>(n);
  const double nn = static_cast<double>(n);

  std::uint64_t accepted = 0, proposed = 0;
  std::uint64_t adapt_accepted = 0, adapt_window = 0;
  for (std::size_t sweep = 0; sweep < params.sweeps; ++sweep) {
    bool burning = sweep < params.burn_in;
    for (std::size_t move = 0; move < n; ++move) {
      std::size_t i = rng.index(n);
      double xi = x[i];
      double xp = xi + sigma * rng.gaussian();
      double dh = nn * (pot.v(xp) - pot.v(xi));
      bool clash = false;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double g_new = std::abs(xp - x[j]);
        if (g_new == 0.0) {
          clash = true;
          break;
        }
        dh += std::log(std::abs(xi - x[j])) - std::log(g_new);
      }
      if (clash) continue;
      bool accept = (dh <= 0.0) || (rng.uniform() < std::exp(-beta * dh));
      if (!burning) {
        ++proposed;
        if (accept) ++accepted;
      } else {
        ++adapt_window;
        if (accept) ++adapt_accepted;
      }
      if (accept) x[i] = xp;
    }
    // adapt proposal width toward the target rate during burn-in
    if (burning && adapt_window >= 50 * n) {
      double rate = static_cast<double>(adapt_accepted) /
                    static_cast<double>(adapt_window);
      sigma *= std::exp(rate - params.target_acceptance);
      adapt_window = adapt_accepted = 0;
    }
  }

  Configuration cfg;
  cfg.points = std::move(x);
  cfg.beta = beta;
  cfg.provenance = {"mcmc", seed, params.sweeps * n,
                    proposed ? static_cast<double>(accepted) /
                                   static_cast<double>(proposed)
                             : 0.0};
  cfg.finalize();
  return cfg;
}

enum class SamplerKind { tridiagonal, mcmc };

struct ReplicaSpec {
  SamplerKind kind = SamplerKind::tridiagonal;
  std::size_t n = 0;
  double beta = 2.0;
  std::uint64_t seed = 0;
  McmcParams mcmc;                         // used when kind == mcmc
  const Potential* potential = nullptr;    // required for mcmc
  const EquilibriumMeasure* eq = nullptr;  // optional hint for mcmc
};

inline Configuration sample_one(const ReplicaSpec& spec, std::uint64_t seed) {
  if (spec.kind == SamplerKind::tridiagonal)
    return sample_tridiagonal(spec.n, spec.beta, seed);
  if (!spec.potential)
    throw InvalidArgument("mcmc replica spec needs a potential");
  McmcParams p = spec.mcmc.sweeps ? spec.mcmc : McmcParams::defaults(spec.n);
  return sample_mcmc(*spec.potential, spec.n, spec.beta, seed, p, spec.eq);
}

inline std::vector<Configuration> sample_replicas(const ReplicaSpec& spec,
                                                  std::size_t count,
                                                  std::size_t workers) {
  if (count < 1) throw InvalidArgument("replica count must be >= 1");
  return parallel_map<Configuration>(count, workers, [&](std::size_t k) {
    return sample_one(spec, derive_seed(spec.seed, k));
  });
}

}  // namespace loggas
