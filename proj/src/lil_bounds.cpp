#include "purex/lil_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace purex {

double radius(std::uint64_t t, double omega, const LilParams& params) {
  if (params.epsilon < 0.0 || params.sigma < 0.0) {
    throw std::invalid_argument(fmt::format("LilParams: epsilon={} and sigma={} must be nonnegative",
                                            params.epsilon, params.sigma));
  }
  if (t == 0) throw std::domain_error("radius: t must be >= 1");
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw std::domain_error(fmt::format("radius: omega={} outside (0, 1]", omega));
  }

  const double eps = params.epsilon;
  const double td = static_cast<double>(t);
  const double shift = params.variant == RadiusVariant::Shifted ? 2.0 : 0.0;
  const double log_arg = std::log((1.0 + eps) * td + shift) / omega;
  if (!(log_arg > 1.0)) {
    throw std::domain_error(
        fmt::format("radius: nested log argument {} <= 1 at t={}, omega={}", log_arg, t, omega));
  }
  const double var = 2.0 * params.sigma * params.sigma * (1.0 + eps) / td;
  return (1.0 + std::sqrt(eps)) * std::sqrt(var * std::log(log_arg));
}

double error_constant(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::domain_error(fmt::format("error_constant: epsilon={} must be > 0", epsilon));
  }
  return (2.0 + epsilon) / epsilon * std::pow(1.0 / std::log1p(epsilon), 1.0 + epsilon);
}

double admissible_delta_ceiling(double epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::domain_error(fmt::format("admissible_delta_ceiling: epsilon={} must be > 0", epsilon));
  }
  return std::log1p(epsilon) / std::numbers::e;
}

std::uint64_t threshold_time(double c, double omega, const LilParams& params, std::uint64_t ceiling) {
  if (!(c > 0.0)) throw std::invalid_argument(fmt::format("threshold_time: c={} must be > 0", c));

  double prev = radius(1, omega, params);
  if (prev < c) return 1;

  // Invariant: radius(lo) >= c.
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  bool monotone = true;
  for (;;) {
    const double r = radius(hi, omega, params);
    if (r >= prev) monotone = false;
    if (r < c) break;
    if (hi > ceiling / 2) {
      throw std::overflow_error(fmt::format("threshold_time: no t <= {} with radius < {}", ceiling, c));
    }
    lo = hi;
    prev = r;
    hi *= 2;
  }

  if (!monotone) {
    for (std::uint64_t t = 1; t < hi; ++t) {
      if (radius(t, omega, params) < c) return t;
    }
    return hi;
  }

  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (radius(mid, omega, params) < c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double lemma2_time_bound(double c, double omega, double epsilon) {
  if (!(c > 0.0)) throw std::domain_error(fmt::format("lemma2_time_bound: c={} must be > 0", c));
  if (!(omega > 0.0 && omega <= 1.0)) {
    throw std::domain_error(fmt::format("lemma2_time_bound: omega={} outside (0, 1]", omega));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::domain_error(fmt::format("lemma2_time_bound: epsilon={} outside (0, 1)", epsilon));
  }
  const double inner = (1.0 + epsilon) / (c * omega);
  if (!(inner > 1.0)) {
    throw std::domain_error(fmt::format("lemma2_time_bound: (1+eps)/(c omega)={} <= 1", inner));
  }
  const double outer = 2.0 * std::log(inner) / omega;
  if (!(outer > 1.0)) {
    throw std::domain_error(fmt::format("lemma2_time_bound: 2 log(...)/omega={} <= 1", outer));
  }
  return std::log(outer) / c;
}

std::uint64_t lemma2_scan_time(double c, double omega, double epsilon, std::uint64_t limit) {
  std::uint64_t last = 0;
  for (std::uint64_t t = 1; t <= limit; ++t) {
    const double td = static_cast<double>(t);
    const double inner = std::log((1.0 + epsilon) * td) / omega;
    if (inner > 0.0 && std::log(inner) / td >= c) last = t;
  }
  return last + 1;
}

double theorem_error_bound(double delta, double epsilon, DeltaForm form, std::size_t n) {
  const double ce = error_constant(epsilon);
  switch (form) {
    case DeltaForm::LinearDelta:
      return ce * delta;
    case DeltaForm::CLUCBForm:
      return ce * std::pow(delta, 1.0 + epsilon) / std::pow(static_cast<double>(n), epsilon);
  }
  throw std::logic_error("theorem_error_bound: unknown form");
}

double faithful_delta(double nu, double epsilon, DeltaForm form, std::size_t n) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw std::domain_error(fmt::format("faithful_delta: nu={} outside (0, 1)", nu));
  }
  const double ce = error_constant(epsilon);
  double delta = 0.0;
  switch (form) {
    case DeltaForm::LinearDelta:
      delta = nu / ce;
      break;
    case DeltaForm::CLUCBForm:
      if (n < 2) throw std::invalid_argument("faithful_delta: CLUCBForm needs n >= 2");
      delta = std::pow(nu * std::pow(static_cast<double>(n), epsilon) / ce, 1.0 / (1.0 + epsilon));
      break;
  }
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::domain_error(fmt::format("faithful_delta: derived delta={} is not positive", delta));
  }
  return std::min(delta, admissible_delta_ceiling(epsilon));
}

}  // namespace purex
