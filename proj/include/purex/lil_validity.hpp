#pragma once

// Monte Carlo check of the anytime LIL bound: simulate zero-mean Gaussian
// paths and count those whose running mean ever exceeds U(t, delta).

#include <cstdint>
#include <span>

#include "purex/lil_bounds.hpp"

namespace purex {

/// True if the running mean of the path seeded by `path_seed` exceeds
/// bound[t-1] for some t <= bound.size().
bool path_violates(std::span<const double> bound, double sigma, std::uint64_t path_seed);

/// Fraction of `paths` violating paths over horizon t = 1..horizon; noise
/// scale is params.sigma. Path p uses seed derive_seed(seed, p). OpenMP
/// parallel over paths. With the Original variant, times where its nested
/// logarithm is undefined use the Shifted radius.
double lil_validity_check(const LilParams& params, double delta, std::uint64_t horizon, std::uint64_t paths,
                          std::uint64_t seed);

/// Single-threaded reference for lil_validity_check.
double lil_validity_check_serial(const LilParams& params, double delta, std::uint64_t horizon,
                                 std::uint64_t paths, std::uint64_t seed);

}  // namespace purex
