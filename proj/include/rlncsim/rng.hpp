#pragma once

#include <cstdint>
#include <random>

namespace rlncsim {

/// All randomness in the library flows through 64-bit Mersenne Twister
/// streams derived from a single master seed.
using Rng = std::mt19937_64;

// splitmix64 finalizer (Steele/Lea/Flood). Used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of substream `index` of a master seed. The split is a pure function
/// of (master, index), so streams can be re-created independently and in any
/// order; this is the documented reproducibility contract.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(substream_seed(master, index));
}

// Fixed substream index offsets within one session. Per-user channel streams
// occupy [0, n); auxiliary streams live far above so a session can grow its
// user count without perturbing existing streams.
inline constexpr std::uint64_t kDecodeStreamBase = 1ULL << 32;
inline constexpr std::uint64_t kCodingStream = 1ULL << 33;

}  // namespace rlncsim
