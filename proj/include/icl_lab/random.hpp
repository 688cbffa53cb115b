#pragma once

#include <cstdint>
#include <random>

namespace icl_lab {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seeded random stream with platform-independent output.
///
/// The standard library's distribution objects are implementation-defined, so
/// every variate here is built directly from the raw 64-bit engine output.
/// Streams for parallel work are obtained with derive(), never by sharing.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream for (seed, stream_id), e.g. one per Monte Carlo trial.
  static Rng derive(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(splitmix64(seed ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe as a log() argument.
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Uniform integer in [0, n) by rejection (no modulo bias). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Marsaglia's polar method.
  double normal();

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape);

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace icl_lab
