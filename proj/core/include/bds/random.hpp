#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace bds {

// One pseudo-random stream. Uniform doubles are produced from raw 64-bit
// draws (never through std::uniform_real_distribution, whose output is
// implementation-defined) so runs replay bit-identically.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; used for thinning marks, which live in half-open
  // intervals ]0, rate].
  double uniform_open01() { return 1.0 - uniform01(); }

  double exponential(double rate);

  // Index drawn proportionally to nonnegative weights with the given total.
  std::size_t pick(std::span<const double> weights, double total);

 private:
  std::mt19937_64 gen_;
};

// Deterministic stream factory: (master seed, role, replicate index) fully
// determines a stream, and distinct roles give unrelated streams. Replicates
// can therefore run in any order on any number of threads.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }
  RngStream stream(std::string_view role, std::uint64_t replicate = 0) const;

 private:
  std::uint64_t master_;
};

}  // namespace bds
