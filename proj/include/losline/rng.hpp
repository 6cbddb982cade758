#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace losline {

// All randomness in the library flows through RandomStream. The engine is
// std::mt19937_64 (bit-exact across platforms, unlike the std distributions),
// and every variate is derived from raw engine output here, so a fixed seed
// reproduces identical results everywhere.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Decorrelated seed for stream `stream` of a master seed. Used to give each
/// trial / lane / per-n integrator its own independent, schedule-independent
/// stream.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream substream(std::uint64_t master, std::uint64_t stream) {
    return RandomStream(substream_seed(master, stream));
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Exponential with the given rate (rate > 0).
  double exponential(double rate) {
    // uniform01() < 1 strictly, so log1p never sees -1.
    return -std::log1p(-uniform01()) / rate;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// +1 or -1 with equal probability.
  int random_sign() { return (engine_() & 1u) ? 1 : -1; }

  std::uint64_t bits() { return engine_(); }

  /// Points of a homogeneous Poisson process of the given intensity on
  /// [lo, hi], in increasing order (sampled via exponential gaps).
  std::vector<double> poisson_process(double intensity, double lo, double hi) {
    std::vector<double> pts;
    if (intensity <= 0.0 || hi <= lo) return pts;
    double t = lo + exponential(intensity);
    while (t <= hi) {
      pts.push_back(t);
      t += exponential(intensity);
    }
    return pts;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace losline
