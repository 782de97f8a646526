#include "linbandit/rng.hpp"

namespace linbandit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t replicate_seed(std::uint64_t master_seed, std::uint64_t replicate) noexcept {
  return splitmix64_mix(master_seed + kGolden * (replicate + 1));
}

std::uint64_t stream_seed(std::uint64_t rep_seed, StreamPurpose purpose) noexcept {
  return splitmix64_mix(rep_seed + kGolden * static_cast<std::uint64_t>(purpose));
}

Rng make_stream(std::uint64_t rep_seed, StreamPurpose purpose) {
  return Rng(stream_seed(rep_seed, purpose));
}

}  // namespace linbandit
