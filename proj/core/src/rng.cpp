#include "vprisk/rng.hpp"

#include <cmath>
#include <numbers>

namespace vprisk {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const noexcept {
  // Two rounds of mixing keyed by the seed; the stream key is mixed before the
  // counter is added so neighbouring (stream, counter) pairs do not collide.
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
  return splitmix64(key + counter * 0xD1B54A32D192ED03ULL);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const noexcept {
  // 53 random mantissa bits, shifted by half an ulp so 0 is never returned.
  const std::uint64_t b = bits(stream, counter) >> 11;
  return (static_cast<double>(b) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t k) const noexcept {
  const double u1 = uniform(stream, 2 * k);
  const double u2 = uniform(stream, 2 * k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::fork(std::uint64_t tag) const noexcept {
  return CounterRng{splitmix64(seed_ ^ splitmix64(~tag))};
}

}  // namespace vprisk
