#include "purex/cpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace purex {

namespace {

double set_value(const ArmSet& set, std::span<const double> weights) {
  double v = 0.0;
  for (auto i : set) v += weights[i];
  return v;
}

void check_weights(const DecisionClass& dc, std::span<const double> weights) {
  if (weights.size() != dc.arms()) {
    throw std::invalid_argument(
        fmt::format("oracle: weight vector has {} entries, class has {} arms", weights.size(), dc.arms()));
  }
}

ArmSet explicit_max(const std::vector<ArmSet>& members, std::span<const double> weights) {
  const ArmSet* best = nullptr;
  double best_value = -std::numeric_limits<double>::infinity();
  for (const auto& m : members) {
    const double v = set_value(m, weights);
    if (best == nullptr || v > best_value || (v == best_value && m < *best)) {
      best = &m;
      best_value = v;
    }
  }
  if (best == nullptr) throw std::domain_error("oracle: empty decision class");
  return *best;
}

ArmSet top_k_max(std::size_t k, std::span<const double> weights) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return weights[a] > weights[b] || (weights[a] == weights[b] && a < b);
                    });
  ArmSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

ArmSet matroid_greedy(const Matroid& m, std::span<const double> weights) {
  const auto order = rank_order(weights);
  ArmSet chosen;
  ArmSet trial;
  for (auto e : order) {
    if (!(weights[e] > 0.0)) break;
    trial = chosen;
    trial.insert(std::upper_bound(trial.begin(), trial.end(), e), e);
    if (m.independent(trial)) chosen.swap(trial);
  }
  return chosen;
}

constexpr std::size_t kMaxEnumerationArms = 20;

}  // namespace

UniformMatroid::UniformMatroid(std::size_t n, std::size_t r) : n_(n), r_(r) {
  if (r_ == 0 || r_ > n_) throw std::invalid_argument(fmt::format("UniformMatroid: rank {} outside [1, {}]", r_, n_));
}

std::size_t UniformMatroid::rank(std::span<const std::size_t> subset) const {
  return std::min(subset.size(), r_);
}

PartitionMatroid::PartitionMatroid(std::vector<std::size_t> block_of, std::vector<std::size_t> capacity)
    : block_of_(std::move(block_of)), capacity_(std::move(capacity)) {
  for (std::size_t i = 0; i < block_of_.size(); ++i) {
    if (block_of_[i] >= capacity_.size()) {
      throw std::invalid_argument(fmt::format("PartitionMatroid: arm {} in unknown block {}", i, block_of_[i]));
    }
  }
}

std::size_t PartitionMatroid::rank(std::span<const std::size_t> subset) const {
  std::vector<std::size_t> used(capacity_.size(), 0);
  for (auto i : subset) ++used.at(block_of_.at(i));
  std::size_t r = 0;
  for (std::size_t b = 0; b < used.size(); ++b) r += std::min(used[b], capacity_[b]);
  return r;
}

DecisionClass DecisionClass::explicit_sets(std::size_t n, std::vector<ArmSet> members,
                                           std::optional<std::size_t> width_hint) {
  for (auto& m : members) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
    if (m.empty()) throw std::invalid_argument("DecisionClass: feasible sets must be nonempty");
    if (m.back() >= n) {
      throw std::invalid_argument(fmt::format("DecisionClass: arm {} outside [0, {})", m.back(), n));
    }
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() < 2) throw std::invalid_argument("DecisionClass: need at least two distinct feasible sets");
  if (width_hint && *width_hint == 0) throw std::invalid_argument("DecisionClass: width hint must be positive");

  DecisionClass dc;
  dc.kind_ = Kind::Explicit;
  dc.n_ = n;
  dc.members_ = std::move(members);
  dc.width_hint_ = width_hint;
  return dc;
}

DecisionClass DecisionClass::top_k(std::size_t n, std::size_t k) {
  if (n < 2 || k < 1 || k >= n) throw std::invalid_argument(fmt::format("DecisionClass: top-{} of {} arms", k, n));
  DecisionClass dc;
  dc.kind_ = Kind::TopK;
  dc.n_ = n;
  dc.k_ = k;
  return dc;
}

DecisionClass DecisionClass::matroid(std::shared_ptr<const Matroid> m, std::optional<std::size_t> width_hint) {
  if (!m) throw std::invalid_argument("DecisionClass: null matroid");
  if (width_hint && *width_hint == 0) throw std::invalid_argument("DecisionClass: width hint must be positive");
  DecisionClass dc;
  dc.kind_ = Kind::Matroid;
  dc.n_ = m->ground_size();
  dc.matroid_ = std::move(m);
  dc.width_hint_ = width_hint;
  return dc;
}

ArmSet oracle_max(const DecisionClass& dc, std::span<const double> weights) {
  check_weights(dc, weights);
  switch (dc.kind()) {
    case DecisionClass::Kind::Explicit:
      return explicit_max(dc.members(), weights);
    case DecisionClass::Kind::TopK:
      return top_k_max(dc.k(), weights);
    case DecisionClass::Kind::Matroid:
      return matroid_greedy(*dc.matroid_ptr(), weights);
  }
  throw std::logic_error("oracle_max: unknown class kind");
}

std::vector<ArmSet> enumerate_feasible(const DecisionClass& dc) {
  if (dc.kind() == DecisionClass::Kind::Explicit) return dc.members();
  const std::size_t n = dc.arms();
  if (n > kMaxEnumerationArms) {
    throw std::length_error(fmt::format("enumerate_feasible: {} arms exceeds the limit of {}", n, kMaxEnumerationArms));
  }
  std::vector<ArmSet> out;
  ArmSet subset;
  for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
    subset.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::uint32_t{1} << i)) subset.push_back(i);
    }
    const bool feasible = dc.kind() == DecisionClass::Kind::TopK ? subset.size() == dc.k()
                                                                 : dc.matroid_ptr()->independent(subset);
    if (feasible) out.push_back(subset);
  }
  return out;
}

CpeGapProfile brute_force_gaps(std::span<const ArmSet> feasible, std::span<const double> means) {
  if (feasible.empty()) throw std::domain_error("cpe gaps: no feasible sets");
  std::vector<double> values(feasible.size());
  std::size_t best = 0;
  for (std::size_t j = 0; j < feasible.size(); ++j) {
    values[j] = set_value(feasible[j], means);
    if (values[j] > values[best]) best = j;
  }
  for (std::size_t j = 0; j < feasible.size(); ++j) {
    if (j != best && values[j] == values[best]) {
      throw std::domain_error(fmt::format("cpe gaps: optimum not unique (value {})", values[best]));
    }
  }

  CpeGapProfile p;
  p.opt_set = feasible[best];
  p.opt_value = values[best];
  const std::size_t n = means.size();
  p.gaps.assign(n, std::numeric_limits<double>::infinity());
  p.unbounded.assign(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_opt = std::binary_search(p.opt_set.begin(), p.opt_set.end(), i);
    double rival = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < feasible.size(); ++j) {
      const bool contains = std::binary_search(feasible[j].begin(), feasible[j].end(), i);
      if (contains != in_opt) rival = std::max(rival, values[j]);
    }
    if (rival > -std::numeric_limits<double>::infinity()) {
      p.gaps[i] = p.opt_value - rival;
      p.unbounded[i] = false;
    }
  }
  return p;
}

CpeGapProfile cpe_gaps(const DecisionClass& dc, std::span<const double> means) {
  check_weights(dc, means);
  if (dc.kind() != DecisionClass::Kind::TopK) return brute_force_gaps(enumerate_feasible(dc), means);

  const Instance instance(std::vector<double>(means.begin(), means.end()), 0.0, dc.k());
  CpeGapProfile p;
  p.gaps = gaps(instance).gaps;
  p.unbounded.assign(means.size(), false);
  p.opt_set = optimal_set(instance);
  p.opt_value = set_value(p.opt_set, means);
  return p;
}

std::size_t width_bound(const DecisionClass& dc) {
  if (dc.width_hint()) return *dc.width_hint();
  return dc.kind() == DecisionClass::Kind::Explicit ? dc.arms() : 2;
}

double cpe_complexity(const DecisionClass& dc, std::span<const double> means, double sigma, double delta) {
  const auto profile = cpe_gaps(dc, means);
  const double width = static_cast<double>(width_bound(dc));
  const double base = std::log(1.0 / delta) + std::log(static_cast<double>(dc.arms()));
  double sum = 0.0;
  for (std::size_t i = 0; i < profile.gaps.size(); ++i) {
    if (profile.unbounded[i]) continue;
    const double g = profile.gaps[i];
    const double loglog = g < 1.0 / std::exp(1.0) ? std::log(std::log(1.0 / g)) : 0.0;
    sum += (base + std::max(0.0, loglog)) / (g * g);
  }
  return width * width * sigma * sigma * sum;
}

RunResult run_general_clucb(const DecisionClass& dc, const AlgoConfig& config, SamplingEnv& env) {
  if (dc.arms() != env.arms()) {
    throw std::invalid_argument(fmt::format("run_general_clucb: class has {} arms, environment {}", dc.arms(), env.arms()));
  }
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument(fmt::format("run_general_clucb: delta={} outside (0, 1)", config.delta));
  }
  if (env.total_pulls() != 0) throw std::logic_error("run_general_clucb: environment is not fresh");

  const std::size_t n = env.arms();
  const ArmSet opt = oracle_max(dc, env.instance().means());
  auto finish = [&](ArmSet output, std::uint64_t rounds, bool capped) {
    RunResult r;
    r.correct = output == opt;
    r.output = std::move(output);
    r.total_samples = env.total_pulls();
    r.per_arm_samples = env.pull_counts();
    r.capped = capped;
    r.rounds = rounds;
    return r;
  };

  if (config.pull_cap < n) return finish({}, 0, true);
  for (std::size_t i = 0; i < n; ++i) env.pull(i);

  const double omega = config.delta / static_cast<double>(n);
  std::vector<double> means(n), radii(n), revised(n);
  auto refresh = [&](std::size_t i) {
    means[i] = env.empirical_mean(i);
    radii[i] = radius(env.pulls(i), omega, config.lil);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::uint64_t rounds = 0;
  for (;;) {
    ++rounds;
    ArmSet m = oracle_max(dc, means);
    for (std::size_t i = 0; i < n; ++i) {
      revised[i] = std::binary_search(m.begin(), m.end(), i) ? means[i] - radii[i] : means[i] + radii[i];
    }
    const ArmSet m_tilde = oracle_max(dc, revised);
    if (m == m_tilde) return finish(std::move(m), rounds, false);
    if (env.total_pulls() + 1 > config.pull_cap) return finish(std::move(m), rounds, true);
    const auto arm = widest_arm(symmetric_difference(m, m_tilde), radii);
    env.pull(arm);
    refresh(arm);
  }
}

}  // namespace purex
