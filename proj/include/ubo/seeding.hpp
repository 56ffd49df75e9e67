#pragma once

#include <cstdint>

namespace ubo {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Independent stream seed for (run seed, purpose, index).
enum class Stream : std::uint64_t { Placement = 1, InitialDesign = 2, Fit = 3, Acquisition = 4 };

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return mix64(mix64(seed ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

}  // namespace ubo
