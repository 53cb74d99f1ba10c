#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>

namespace sphrs::testing {

/// Seed for randomized fixtures; SPHRS_SEED overrides the default.
inline std::uint64_t test_seed(std::uint64_t fallback = 20240611ULL) {
    if (const char* env = std::getenv("SPHRS_SEED"); env != nullptr && *env != '\0') {
        return std::stoull(env);
    }
    return fallback;
}

inline std::mt19937_64 make_rng(std::uint64_t salt = 0) { return std::mt19937_64(test_seed() ^ (salt * 0x9E3779B97F4A7C15ULL)); }

}  // namespace sphrs::testing
