#pragma once

#include <cstdint>
#include <random>

namespace rbresale {

using Rng = std::mt19937_64;

/// Named sub-streams derived from one run seed so that schemes sharing a
/// seed see identical traffic and mobility draws.
enum class Stream : std::uint32_t { Traffic = 1, Mobility = 2, Roles = 3, InitialBuffer = 4, Population = 5 };

inline Rng make_stream(std::uint64_t seed, Stream stream, std::uint32_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), index};
  return Rng(seq);
}

/// Uniform in [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace rbresale
