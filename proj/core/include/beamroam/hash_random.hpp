#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace beamroam {

// Counter-based draws: every random quantity in the simulator is a pure
// function of a key, so results do not depend on event-processing order.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t a) { return splitmix64(a); }

template <typename... Rest>
constexpr std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return hash_key(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL), static_cast<std::uint64_t>(rest)...);
}

/// Uniform in the open interval (0, 1).
constexpr double uniform01(std::uint64_t key) {
  return (static_cast<double>(splitmix64(key) >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Box-Muller on two derived uniforms.
inline double standard_normal(std::uint64_t key) {
  const double u1 = uniform01(key ^ 0x5851f42d4c957f2dULL);
  const double u2 = uniform01(key ^ 0x14057b7ef767814fULL);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace beamroam
