#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace femtoq {

using Rng = std::mt19937_64;

// The std distributions are implementation-defined; these two keep traces
// bit-identical across standard libraries.

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

}  // namespace femtoq
