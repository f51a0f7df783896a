#pragma once

#include <cstdint>
#include <random>

namespace rkm {

/// SplitMix64 finalizer; used to derive independent stream seeds from one
/// master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for stream `stream` under `purpose` (a small tag distinguishing uses
/// such as driver columns, initial conditions, Monte Carlo trials).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t purpose,
                                    std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master ^ splitmix64(purpose + 0x51ED270B5ULL)) + stream);
}

using Rng = std::mt19937_64;

namespace seed_purpose {
inline constexpr std::uint64_t kDriverColumn = 1;
inline constexpr std::uint64_t kInitialCondition = 2;
inline constexpr std::uint64_t kTrial = 3;
inline constexpr std::uint64_t kSampling = 4;
inline constexpr std::uint64_t kFrequencies = 5;
inline constexpr std::uint64_t kGraph = 6;
}  // namespace seed_purpose

}  // namespace rkm
