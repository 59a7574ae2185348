#pragma once

#include <cstdint>
#include <random>

namespace loggas {

// splitmix64, used both as a seed scrambler and to derive independent
// per-replica streams from (seed, replica index).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4a2b592d76253ULL ^ 0x2545f4914f6cdd1dULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0xa0761d6478bd642fULL * (stream + 1));
  std::uint64_t a = splitmix64(s);
  std::uint64_t b = splitmix64(s);
  return a ^ (b << 1);
}

// Each sampler/replica owns one of these; no shared state anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return uni_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uni_(engine_); }
  double gaussian() { return normal_(engine_); }
  double gaussian(double mean, double sd) { return mean + sd * normal_(engine_); }
  // chi distribution with k degrees of freedom (k need not be integral)
  double chi(double k) {
    std::gamma_distribution<double> gamma(0.5 * k, 2.0);
    return std::sqrt(gamma(engine_));
  }
  std::uint64_t raw() { return engine_(); }
  std::size_t index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> d(0, n - 1);
    return d(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uni_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace loggas
