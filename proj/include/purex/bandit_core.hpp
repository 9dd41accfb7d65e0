#pragma once

// Problem instances, gap profiles and the metered sampling environment.
// Arms are indexed 0..N-1 throughout the library.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace purex {

using Rng = std::mt19937_64;
using ArmSet = std::vector<std::size_t>;  // sorted ascending, no duplicates

enum class Family {
  OneSparseK,        // K arms at 1/2, the rest at 0
  AlphaExponential,  // two-sided power profile around (N-K)/N
  OneSparseBest1,    // one arm at 1/2, the rest at 0 (K = 1)
  LilExponential,    // 1, then 1 - ((i-1)/N)^alpha (K = 1)
};

std::string_view family_name(Family family);
Family parse_family(std::string_view name);
bool family_uses_alpha(Family family);
bool family_is_best1(Family family);

class Instance {
 public:
  /// Throws std::invalid_argument unless N >= 2, 1 <= K <= N-1, sigma >= 0,
  /// all means are finite and the K-th largest mean strictly exceeds the
  /// (K+1)-th.
  Instance(std::vector<double> means, double sigma, std::size_t k);

  const std::vector<double>& means() const noexcept { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  double sigma() const noexcept { return sigma_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t size() const noexcept { return means_.size(); }

  /// Relabelled copy: arm i of the result is arm perm[i] of *this.
  Instance permuted(std::span<const std::size_t> perm) const;

 private:
  std::vector<double> means_;
  double sigma_;
  std::size_t k_;
};

Instance make_instance(Family family, std::size_t n, std::size_t k, double alpha, double sigma = 0.5);

struct GapProfile {
  std::vector<double> gaps;
  double h_complexity = 0.0;  // sum of gaps^-2
};

GapProfile gaps(const Instance& instance);

/// Indices ordered by value descending, lower index first among equals.
std::vector<std::size_t> rank_order(std::span<const double> values);

ArmSet optimal_set(const Instance& instance);

// ---- seeding -------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for stream `stream` of `base`; distinct streams are independent.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

enum class Stream : std::uint64_t { Reward = 1, Decision = 2, Shuffle = 3 };

inline Rng make_stream(std::uint64_t trial_seed, Stream stream) {
  return Rng(derive_seed(trial_seed, static_cast<std::uint64_t>(stream)));
}

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// ---- sampling environment ------------------------------------------------

class SamplingEnv {
 public:
  SamplingEnv(Instance instance, std::uint64_t reward_seed);

  /// Gaussian reward N(mu_arm, sigma^2); updates the per-arm accounting.
  double pull(std::size_t arm);

  const Instance& instance() const noexcept { return instance_; }
  std::size_t arms() const noexcept { return instance_.size(); }
  std::uint64_t total_pulls() const noexcept { return total_pulls_; }
  std::uint64_t pulls(std::size_t arm) const { return pull_counts_.at(arm); }
  const std::vector<std::uint64_t>& pull_counts() const noexcept { return pull_counts_; }
  const std::vector<double>& reward_sums() const noexcept { return reward_sums_; }

  /// Requires at least one pull of `arm`.
  double empirical_mean(std::size_t arm) const;

 private:
  Instance instance_;
  std::vector<std::uint64_t> pull_counts_;
  std::vector<double> reward_sums_;
  std::uint64_t total_pulls_ = 0;
  Rng rewards_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace purex
