#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is a pure
// function of (key, counter), so any element of any stream can be produced
// independently: the library maps (seed, stream, index) -> key = seed,
// counter = (index, stream).

#include <array>
#include <cstdint>

namespace polar::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

constexpr Counter philox4x32_10(Counter ctr, Key key) noexcept {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Uniform double in the open interval (0, 1) from 52 random bits. (With 53 bits the top
/// cell's midpoint 1 - 2^-54 would round to 1.)
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// Two independent uniforms for element `index` of stream `stream` under `seed`.
constexpr std::array<double, 2> uniform_pair(std::uint64_t seed, std::uint64_t stream,
                                             std::uint64_t index) noexcept {
  const Counter out = philox4x32_10(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
}

}  // namespace polar::rng
