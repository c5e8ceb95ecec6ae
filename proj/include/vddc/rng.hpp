#pragma once

#include <cstdint>
#include <random>

namespace vddc {

// splitmix64 finalizer; derives independent stream seeds from
// (master seed, unit index).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t unit) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (unit + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Explicit per-run random stream. Draws are defined bit for bit here rather
// than through <random> distributions, whose output is library specific.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace vddc
