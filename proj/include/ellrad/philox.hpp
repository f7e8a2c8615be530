#pragma once

// Counter-based Gaussian generation. Every value is a pure function of
// (key, counter), so any entry of any stream can be regenerated in isolation.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ellrad {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used to derive independent keys from tuples.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and up to three integer labels.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(a + 0x1000193ull));
  h = mix64(h ^ mix64(b + 0x2000387ull));
  h = mix64(h ^ mix64(c + 0x300057Bull));
  return h;
}

/// Two independent standard normals for cell (row, pair) of the stream keyed
/// by `seed` (Box-Muller on two 53-bit uniforms from one Philox block).
inline std::array<double, 2> normal_pair(std::uint64_t seed, std::uint64_t row,
                                         std::uint64_t pair) noexcept {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(pair), static_cast<std::uint32_t>(pair >> 32),
       static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  constexpr double kInv53 = 1.0 / 9007199254740992.0;
  const double u1 = static_cast<double>((w0 >> 11) + 1) * kInv53;  // (0, 1]
  const double u2 = static_cast<double>(w1 >> 11) * kInv53;        // [0, 1)
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

/// Standard normal at position (row, col) of the stream keyed by `seed`.
inline double normal_at(std::uint64_t seed, std::uint64_t row, std::uint64_t col) noexcept {
  return normal_pair(seed, row, col >> 1)[col & 1u];
}

/// Uniform in [0, 1) at position (row, col) of the stream keyed by `seed`.
inline double uniform_at(std::uint64_t seed, std::uint64_t row, std::uint64_t col) noexcept {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(col), static_cast<std::uint32_t>(col >> 32),
       static_cast<std::uint32_t>(row), static_cast<std::uint32_t>(row >> 32) ^ 0x5A5A5A5Au},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const std::uint64_t w = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  return static_cast<double>(w >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace ellrad
