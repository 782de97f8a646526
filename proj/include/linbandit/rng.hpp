// Seeded random streams.
//
// Every stream is a std::mt19937_64 (64-bit Mersenne Twister, MT19937-64).
// Stream seeds come from a master seed through the SplitMix64 finalizer:
//
//   replicate_seed = mix(master + GOLDEN * (replicate + 1))
//   stream_seed    = mix(replicate_seed + GOLDEN * purpose)
//
// where GOLDEN = 0x9E3779B97F4A7C15 and mix() is the SplitMix64 output
// function. Streams for different replicates and purposes are therefore
// independent of scheduling order.
#pragma once

#include <cstdint>
#include <random>

namespace linbandit {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint64_t {
  Contexts = 1,
  Perturbations = 2,
  Rewards = 3,
  ThetaDraw = 4,
  Policy = 5,
  Restriction = 6,
  Instance = 7,
  Simulation = 8,
  Bootstrap = 9,
};

/// SplitMix64 output function (Steele, Lea, Flood 2014).
std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) noexcept;
std::uint64_t stream_seed(std::uint64_t replicate_seed, StreamPurpose purpose) noexcept;

Rng make_stream(std::uint64_t replicate_seed, StreamPurpose purpose);

}  // namespace linbandit
