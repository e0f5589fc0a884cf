#pragma once

#include <cmath>
#include <cstdint>

namespace carnot {

/// Deterministic PRNG (splitmix64). Every sampling operation takes an
/// explicit seed so reruns are reproducible byte-for-byte across
/// platforms; no <random> distributions, their output is
/// implementation-defined.
class Rng {
public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n) { return next() % n; }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 1e-300) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(6.283185307179586477 * u2);
    have_cached_ = true;
    return r * std::cos(6.283185307179586477 * u2);
  }

  /// Derive an independent stream (for per-sample determinism).
  Rng split(uint64_t salt) { return Rng(state_ ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL)); }

private:
  uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace carnot
