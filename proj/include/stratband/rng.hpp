#pragma once

#include <cstdint>

// Counter-based random streams: every draw is a pure function of
// (seed, stream, index). No generator state is carried between rounds,
// so two runs that address the same (stream, index) cells see the same
// values no matter what happens in between. That property is what makes
// coupled replays exact instead of approximate.

namespace stratband::rng {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ stream);
  return mix64(h ^ index);
}

// Uniform in [0, 1), 53 mantissa bits.
constexpr double u01(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index) noexcept {
  return static_cast<double>(at(seed, stream, index) >> 11) * 0x1.0p-53;
}

// Stream ids. Reward tapes are indexed by pull count, strategy coins by
// (pull, draw), policy streams by round, so deviations that shift *when*
// an arm is pulled never shift *what* it draws.
constexpr std::uint64_t tape_stream(int arm) noexcept {
  return 0x100000000ull + static_cast<std::uint64_t>(arm);
}
constexpr std::uint64_t strategy_stream(int arm) noexcept {
  return 0x200000000ull + static_cast<std::uint64_t>(arm);
}
constexpr std::uint64_t policy_coin_stream = 0x300000000ull;
constexpr std::uint64_t policy_explore_stream = 0x300000001ull;
constexpr std::uint64_t policy_tie_stream = 0x300000002ull;
constexpr std::uint64_t mechanism_stream = 0x400000000ull;

// Per-(round, arm) tie priority. Arm count is bounded well below the
// stride, so cells never collide.
constexpr std::uint64_t tie_index(std::uint64_t round, int arm) noexcept {
  return round * 1024ull + static_cast<std::uint64_t>(arm);
}

// Strategies draw at (pull * 8 + draw) and may take up to 8 draws per pull.
constexpr std::uint64_t strategy_index(std::uint64_t pull,
                                       std::uint64_t draw) noexcept {
  return pull * 8ull + draw;
}

// Cursor-carrying view of one stream, for consumers that just need a
// sequence of draws and not addressable cells.
struct Stream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t cursor = 0;

  double u01() noexcept { return rng::u01(seed, stream, cursor++); }
  std::uint64_t next() noexcept { return rng::at(seed, stream, cursor++); }
};

}  // namespace stratband::rng
