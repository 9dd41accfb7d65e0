#include "purex/bandit_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace purex {

namespace {

struct FamilyEntry {
  Family family;
  std::string_view name;
};

constexpr FamilyEntry kFamilies[] = {
    {Family::OneSparseK, "one_sparse_k"},
    {Family::AlphaExponential, "alpha_exponential"},
    {Family::OneSparseBest1, "one_sparse_best1"},
    {Family::LilExponential, "lil_exponential"},
};

}  // namespace

std::string_view family_name(Family family) {
  for (const auto& e : kFamilies) {
    if (e.family == family) return e.name;
  }
  throw std::logic_error("family_name: unknown family");
}

Family parse_family(std::string_view name) {
  for (const auto& e : kFamilies) {
    if (e.name == name) return e.family;
  }
  throw std::invalid_argument(fmt::format("unknown instance family '{}'", name));
}

bool family_uses_alpha(Family family) {
  return family == Family::AlphaExponential || family == Family::LilExponential;
}

bool family_is_best1(Family family) {
  return family == Family::OneSparseBest1 || family == Family::LilExponential;
}

Instance::Instance(std::vector<double> means, double sigma, std::size_t k)
    : means_(std::move(means)), sigma_(sigma), k_(k) {
  const std::size_t n = means_.size();
  if (n < 2) throw std::invalid_argument(fmt::format("Instance: need N >= 2 arms, got {}", n));
  if (k_ < 1 || k_ > n - 1) {
    throw std::invalid_argument(fmt::format("Instance: K={} outside [1, N-1] for N={}", k_, n));
  }
  if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) {
    throw std::invalid_argument(fmt::format("Instance: sigma={} must be finite and >= 0", sigma_));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(means_[i])) {
      throw std::invalid_argument(fmt::format("Instance: mean of arm {} is not finite", i));
    }
  }
  std::vector<double> sorted = means_;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_), sorted.end(),
                   std::greater<>());
  const double kth = *std::min_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k_));
  const double next = sorted[k_];
  if (!(kth > next)) {
    throw std::invalid_argument(
        fmt::format("Instance: optimal set is not unique (mu(K)={} vs mu(K+1)={})", kth, next));
  }
}

Instance Instance::permuted(std::span<const std::size_t> perm) const {
  if (perm.size() != size()) throw std::invalid_argument("Instance::permuted: size mismatch");
  std::vector<double> out(size());
  for (std::size_t i = 0; i < perm.size(); ++i) out[i] = means_.at(perm[i]);
  return Instance(std::move(out), sigma_, k_);
}

Instance make_instance(Family family, std::size_t n, std::size_t k, double alpha, double sigma) {
  if (n < 2) throw std::invalid_argument(fmt::format("make_instance: n={} must be >= 2", n));
  if (family_is_best1(family)) k = 1;
  if (k < 1 || k > n - 1) {
    throw std::invalid_argument(fmt::format("make_instance: k={} outside [1, {}]", k, n - 1));
  }
  if (family_uses_alpha(family) && !(alpha > 0.0)) {
    throw std::invalid_argument(fmt::format("make_instance: alpha={} must be > 0", alpha));
  }

  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  std::vector<double> means(n, 0.0);
  switch (family) {
    case Family::OneSparseK:
      std::fill_n(means.begin(), k, 0.5);
      break;
    case Family::OneSparseBest1:
      means[0] = 0.5;
      break;
    case Family::AlphaExponential: {
      const double base = (nd - kd) / nd;
      for (std::size_t r = 1; r <= n; ++r) {
        const double rd = static_cast<double>(r);
        means[r - 1] = r <= k ? base + (kd / nd) * std::pow((kd - rd) / kd, alpha)
                              : base - base * std::pow((rd - kd) / (nd - kd), alpha);
      }
      break;
    }
    case Family::LilExponential:
      means[0] = 1.0;
      for (std::size_t r = 2; r <= n; ++r) {
        means[r - 1] = 1.0 - std::pow(static_cast<double>(r - 1) / nd, alpha);
      }
      break;
  }
  return Instance(std::move(means), sigma, k);
}

std::vector<std::size_t> rank_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

GapProfile gaps(const Instance& instance) {
  const auto& mu = instance.means();
  const auto order = rank_order(mu);
  const double mu_k = mu[order[instance.k() - 1]];
  const double mu_k1 = mu[order[instance.k()]];
  if (!(mu_k > mu_k1)) throw std::domain_error("gaps: mu(K) == mu(K+1)");

  GapProfile profile;
  profile.gaps.resize(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double g = mu[i] >= mu_k ? mu[i] - mu_k1 : mu_k - mu[i];
    profile.gaps[i] = g;
    profile.h_complexity += 1.0 / (g * g);
  }
  return profile;
}

ArmSet optimal_set(const Instance& instance) {
  const auto order = rank_order(instance.means());
  ArmSet opt(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(instance.k()));
  std::sort(opt.begin(), opt.end());
  return opt;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ (stream * 0xd1b54a32d192ed03ULL));
}

SamplingEnv::SamplingEnv(Instance instance, std::uint64_t reward_seed)
    : instance_(std::move(instance)),
      pull_counts_(instance_.size(), 0),
      reward_sums_(instance_.size(), 0.0),
      rewards_(reward_seed) {}

double SamplingEnv::pull(std::size_t arm) {
  if (arm >= arms()) throw std::out_of_range(fmt::format("pull: arm {} >= N={}", arm, arms()));
  const double reward = instance_.mean(arm) + instance_.sigma() * noise_(rewards_);
  ++pull_counts_[arm];
  reward_sums_[arm] += reward;
  ++total_pulls_;
  return reward;
}

double SamplingEnv::empirical_mean(std::size_t arm) const {
  const auto n = pull_counts_.at(arm);
  if (n == 0) throw std::logic_error(fmt::format("empirical_mean: arm {} never pulled", arm));
  return reward_sums_[arm] / static_cast<double>(n);
}

}  // namespace purex
