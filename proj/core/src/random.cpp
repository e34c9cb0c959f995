#include "bds/random.hpp"

#include <cmath>
#include <stdexcept>

namespace bds {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

double RngStream::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be positive");
  return -std::log(uniform_open01()) / rate;
}

std::size_t RngStream::pick(std::span<const double> weights, double total) {
  const double u = uniform01() * total;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
    acc += weights[k];
    if (u < acc) return k;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

RngStream RandomSource::stream(std::string_view role, std::uint64_t replicate) const {
  std::uint64_t s = splitmix64(master_ ^ fnv1a(role));
  s = splitmix64(s ^ (0x6C62272E07BB0142ULL * (replicate + 1)));
  return RngStream(s);
}

}  // namespace bds
