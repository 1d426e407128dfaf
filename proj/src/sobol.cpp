#include "urank/specfun.hpp"

#include <bit>

namespace urank::specfun {
namespace {

constexpr int kBits = 32;

struct Directions {
  std::array<std::uint32_t, kBits> first{};
  std::array<std::uint32_t, kBits> second{};
  constexpr Directions() {
    // First coordinate: van der Corput in base 2.
    for (int k = 0; k < kBits; ++k) first[k] = std::uint32_t{1} << (kBits - 1 - k);
    // Second coordinate: primitive polynomial x + 1 with initial m_1 = 1.
    second[0] = std::uint32_t{1} << (kBits - 1);
    for (int k = 1; k < kBits; ++k) second[k] = second[k - 1] ^ (second[k - 1] >> 1);
  }
};

constexpr Directions kDirections{};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

} // namespace

std::vector<std::array<double, 2>> sobol_pairs(std::size_t m, std::uint64_t seed) {
  std::uint32_t shift0 = 0;
  std::uint32_t shift1 = 0;
  if (seed != 0) {
    std::uint64_t state = seed;
    const std::uint64_t bits = splitmix64(state);
    shift0 = static_cast<std::uint32_t>(bits);
    shift1 = static_cast<std::uint32_t>(bits >> 32);
  }
  constexpr double scale = 1.0 / 4294967296.0; // 2^-32
  std::vector<std::array<double, 2>> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::uint32_t x0 = shift0;
    std::uint32_t x1 = shift1;
    auto idx = static_cast<std::uint32_t>(i ^ (i >> 1)); // Gray-code order
    while (idx != 0) {
      const int b = std::countr_zero(idx);
      x0 ^= kDirections.first[b];
      x1 ^= kDirections.second[b];
      idx &= idx - 1;
    }
    out[i] = {x0 * scale, x1 * scale};
  }
  return out;
}

} // namespace urank::specfun
