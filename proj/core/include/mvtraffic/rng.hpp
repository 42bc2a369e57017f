#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace mvtraffic {

// Deterministic random source shared by every stochastic operation in the
// library. std::mt19937_64 output is pinned by the standard, but the
// std::*_distribution adapters are not, so all samplers here are hand rolled
// on top of the raw 64-bit stream. A given seed therefore produces the same
// draws on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Child seed for substream `index`, mixed splitmix64-style. Callers that
  // need independent streams (Monte Carlo runs, state vs emission draws)
  // derive one child per stream from a single user-facing seed.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Index drawn proportionally to `weights` (nonnegative, positive sum; need
  // not be normalized).
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) {
        throw std::invalid_argument("categorical: negative or NaN weight");
      }
      total += w;
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("categorical: weights sum to zero");
    }
    const double u = uniform01() * total;
    double cum = 0.0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] > 0.0) last_positive = i;
      cum += weights[i];
      if (u < cum) return i;
    }
    // Rounding can leave cum marginally below total; fall back to the last
    // index that carries mass.
    return last_positive;
  }

  // Poisson via pmf inversion. Large means are split in half recursively so
  // exp(-mean) stays well above the underflow threshold.
  long poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean > 400.0) {
      const double half = mean / 2.0;
      return poisson(half) + poisson(mean - half);
    }
    const double u = uniform01();
    double p = std::exp(-mean);
    double cum = p;
    long k = 0;
    while (u >= cum) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
      if (p <= 0.0 || k > 10'000'000L) break;
    }
    return k;
  }

  // Standard normal via Box-Muller.
  double normal() {
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  // Gamma(shape, rate) via Marsaglia-Tsang squeeze; shapes below one use the
  // boost Gamma(shape+1) * U^(1/shape).
  double gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
      throw std::invalid_argument("gamma: shape and rate must be > 0");
    }
    if (shape < 1.0) {
      double u;
      do {
        u = uniform01();
      } while (u <= 0.0);
      return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return d * v / rate;
      }
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mvtraffic
