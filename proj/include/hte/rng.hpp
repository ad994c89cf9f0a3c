#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace hte {

// Counter-based stream derivation: a (seed, path...) tuple maps to an
// independent deterministic substream, so any bootstrap draw or simulation
// replication is reproducible in isolation and independent of scheduling.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> path) {
  std::uint64_t k = mix64(seed);
  for (std::uint64_t p : path) k = mix64(k ^ mix64(p));
  return k;
}

// Deterministic generator wrapper. Uniform/normal/rademacher are implemented
// from raw bits so results do not depend on the standard library's
// distribution internals.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : eng_(key) {}
  RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : eng_(derive_stream(seed, path)) {}

  std::uint64_t bits() { return eng_(); }

  // uniform on (0,1]
  double uniform() {
    return static_cast<double>((bits() >> 11) + 1) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double rademacher() { return (bits() & 1u) ? 1.0 : -1.0; }

  // uniform integer in [0, m)
  std::uint64_t uniform_int(std::uint64_t m) { return bits() % m; }

  // Marsaglia-Tsang; shape boosted below one
  double gamma(double shape) {
    if (shape < 1.0)
      return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double chi_square(double df) { return 2.0 * gamma(0.5 * df); }

  double student_t(double df) {
    return normal() / std::sqrt(chi_square(df) / df);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hte
