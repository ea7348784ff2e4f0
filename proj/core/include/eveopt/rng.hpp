#pragma once

#include <cstdint>
#include <random>

namespace eveopt {

/// SplitMix64 finalizer; used to derive independent stream seeds from a
/// master seed.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for stream `stream`, sub-index `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) noexcept;

/// Named stream ids. Changing these values changes every golden trace.
namespace streams {
inline constexpr std::uint64_t init = 1;
inline constexpr std::uint64_t batches = 2;
inline constexpr std::uint64_t gradient_noise = 3;
inline constexpr std::uint64_t dataset = 4;
}  // namespace streams

/// Portable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. We deliberately avoid std::*_distribution (their output is
/// implementation-defined) and build every variate from raw 64-bit words:
///   uniform()  : top 53 bits scaled by 2^-53, in [0, 1)
///   below(n)   : Lemire's multiply-shift with rejection, unbiased
///   normal()   : Marsaglia polar method, one variate per call (no caching)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace eveopt
