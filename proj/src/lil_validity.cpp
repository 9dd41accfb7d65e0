#include "purex/lil_validity.hpp"

#include <random>
#include <stdexcept>
#include <vector>

#include "purex/bandit_core.hpp"
#include "purex/parallel.hpp"

namespace purex {

namespace {

std::vector<double> bound_table(const LilParams& params, double delta, std::uint64_t horizon) {
  if (horizon < 1) throw std::invalid_argument("lil_validity_check: horizon must be >= 1");
  std::vector<double> bound(horizon);
  LilParams shifted = params;
  shifted.variant = RadiusVariant::Shifted;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    try {
      bound[t - 1] = radius(t, delta, params);
    } catch (const std::domain_error&) {
      if (params.variant != RadiusVariant::Original) throw;
      bound[t - 1] = radius(t, delta, shifted);
    }
  }
  return bound;
}

}  // namespace

bool path_violates(std::span<const double> bound, double sigma, std::uint64_t path_seed) {
  Rng rng(path_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  double sum = 0.0;
  for (std::size_t t = 1; t <= bound.size(); ++t) {
    sum += sigma * noise(rng);
    if (sum / static_cast<double>(t) > bound[t - 1]) return true;
  }
  return false;
}

double lil_validity_check(const LilParams& params, double delta, std::uint64_t horizon, std::uint64_t paths,
                          std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("lil_validity_check: paths must be >= 1");
  const auto bound = bound_table(params, delta, horizon);
  const auto count = static_cast<std::int64_t>(paths);
  std::int64_t violations = 0;
#pragma omp parallel for schedule(static) reduction(+ : violations) num_threads(worker_count())
  for (std::int64_t p = 0; p < count; ++p) {
    if (path_violates(bound, params.sigma, derive_seed(seed, static_cast<std::uint64_t>(p)))) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(paths);
}

double lil_validity_check_serial(const LilParams& params, double delta, std::uint64_t horizon,
                                 std::uint64_t paths, std::uint64_t seed) {
  if (paths < 1) throw std::invalid_argument("lil_validity_check: paths must be >= 1");
  const auto bound = bound_table(params, delta, horizon);
  std::uint64_t violations = 0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    if (path_violates(bound, params.sigma, derive_seed(seed, p))) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(paths);
}

}  // namespace purex
