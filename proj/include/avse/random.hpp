// Portable seeded randomness. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the conversions below are explicit
// because std:: distributions differ between standard libraries.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace avse {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), n > 0 (rejection sampling, no modulo bias).
  std::size_t index(std::size_t n);

  // Standard normal via Box-Muller; no cached second variate so the stream
  // position depends only on the number of calls.
  double normal();

  // Derived independent stream for sub-task `k` (e.g. scenario k of a batch).
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace avse
