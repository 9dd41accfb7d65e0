#pragma once

// Anytime confidence radius from the finite-time law of the iterated
// logarithm, together with the quantities derived from it: the failure
// constant c_eps, threshold (settling) times, a closed-form time bound and
// the confidence parameter that makes the algorithms' error bounds meet a
// target level.

#include <cstddef>
#include <cstdint>

namespace purex {

enum class RadiusVariant {
  Original,  // log(log((1+eps) t) / omega)
  Shifted,   // log(log((1+eps) t + 2) / omega), defined for every t >= 1
};

struct LilParams {
  double epsilon = 0.0;
  double sigma = 0.5;
  RadiusVariant variant = RadiusVariant::Shifted;
};

/// U(t, omega) = (1+sqrt(eps)) * sqrt(2 sigma^2 (1+eps) / t * log(log((1+eps) t [+2]) / omega)).
///
/// Throws std::domain_error when t == 0, omega is outside (0, 1], or the
/// nested logarithm's argument is <= 1. Throws std::invalid_argument for a
/// negative epsilon or sigma.
double radius(std::uint64_t t, double omega, const LilParams& params);

/// c_eps = (2+eps)/eps * (1/log(1+eps))^(1+eps). Requires eps > 0.
double error_constant(double epsilon);

/// Lemma 1's admissible ceiling on delta: log(1+eps)/e.
double admissible_delta_ceiling(double epsilon);

inline constexpr std::uint64_t kThresholdCeiling = std::uint64_t{1} << 62;

/// Smallest t >= 1 with radius(t, omega, params) < c.
///
/// Exponential doubling followed by bisection. If the probe sequence shows the
/// radius failing to decrease (the Original variant rises for small t), the
/// answer is recomputed by a linear scan up to the doubling bracket.
/// Throws std::overflow_error when the bracket would pass `ceiling`.
std::uint64_t threshold_time(double c, double omega, const LilParams& params,
                             std::uint64_t ceiling = kThresholdCeiling);

/// (1/c) log(2 log((1+eps)/(c omega)) / omega): every t with
/// (1/t) log(log((1+eps) t)/omega) >= c lies below this value.
double lemma2_time_bound(double c, double omega, double epsilon);

/// One past the last t <= limit with (1/t) log(log((1+eps) t)/omega) >= c
/// (1 if there is none), found by direct scan.
std::uint64_t lemma2_scan_time(double c, double omega, double epsilon, std::uint64_t limit);

enum class DeltaForm {
  LinearDelta,  // error <= c_eps * delta
  CLUCBForm,    // error <= c_eps * delta^(1+eps) / N^eps
};

/// Error-probability bound guaranteed for a given delta under `form`.
double theorem_error_bound(double delta, double epsilon, DeltaForm form, std::size_t n);

/// Largest delta whose theorem error bound equals nu, clamped to the
/// admissible ceiling. `n` is only read for CLUCBForm.
double faithful_delta(double nu, double epsilon, DeltaForm form, std::size_t n);

}  // namespace purex
