// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace isacest {

/// One step of the splitmix64 generator (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent seed for sub-stream `stream`, item `index` of a base seed.
/// Trials use derive_seed(campaign_seed, stream, trial_index); the streams
/// below keep the mask, payload, paths and noise of one trial uncorrelated.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(base ^ splitmix64(stream)) + index);
}

namespace stream {
inline constexpr std::uint64_t kMask = 1;
inline constexpr std::uint64_t kPayload = 2;
inline constexpr std::uint64_t kPaths = 3;
inline constexpr std::uint64_t kNoise = 4;
inline constexpr std::uint64_t kPilots = 5;
}  // namespace stream

}  // namespace isacest
