#include "purex/topk_algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace purex {

namespace {

struct AlgorithmEntry {
  Algorithm algorithm;
  std::string_view name;
};

constexpr AlgorithmEntry kAlgorithms[] = {
    {Algorithm::LilRandLUCB, "lil_rand_lucb"}, {Algorithm::LilCLUCB, "lil_clucb"},
    {Algorithm::LUCB, "lucb"},                 {Algorithm::LUCBPlusPlus, "lucb_pp"},
    {Algorithm::LilLUCB, "lil_lucb"},          {Algorithm::LilUCB, "lil_ucb"},
};

bool is_lucb_family(Algorithm a) {
  return a == Algorithm::LilRandLUCB || a == Algorithm::LUCBPlusPlus || a == Algorithm::LilLUCB ||
         a == Algorithm::LUCB;
}

// Strict total order: larger value first, then lower index.
struct ByValueDesc {
  std::span<const double> values;
  bool operator()(std::size_t a, std::size_t b) const {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  }
};

// Fills `order` so its first k entries are the top-k arms of `values`.
void select_top_k(std::span<const double> values, std::size_t k, std::vector<std::size_t>& order) {
  order.resize(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                   ByValueDesc{values});
}

ArmSet top_k_set(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> order;
  select_top_k(values, k, order);
  ArmSet out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(out.begin(), out.end());
  return out;
}

// LUCB exploration rate for bounded rewards, rescaled to sigma-sub-Gaussian.
double lucb_log_term(std::uint64_t round, double delta, std::size_t n) {
  const double r = static_cast<double>(round);
  return std::log(5.0 * static_cast<double>(n) * r * r * r * r / (4.0 * delta));
}

double lucb_radius(double log_term, std::uint64_t t, double sigma) {
  return 2.0 * sigma * std::sqrt(log_term / (2.0 * static_cast<double>(t)));
}

RunResult finish(SamplingEnv& env, ArmSet output, std::uint64_t rounds, bool capped,
                 std::optional<StopCertificate> certificate) {
  RunResult result;
  result.correct = output == optimal_set(env.instance());
  result.output = std::move(output);
  result.total_samples = env.total_pulls();
  result.per_arm_samples = env.pull_counts();
  result.capped = capped;
  result.rounds = rounds;
  result.certificate = certificate;
  return result;
}

// Pulls every arm once; false if the cap does not allow it.
bool initialize(SamplingEnv& env, std::uint64_t pull_cap) {
  if (env.total_pulls() != 0) throw std::logic_error("run: environment is not fresh");
  if (pull_cap < env.arms()) return false;
  for (std::size_t i = 0; i < env.arms(); ++i) env.pull(i);
  return true;
}

RunResult run_lucb_family(const AlgoConfig& cfg, SamplingEnv& env, Rng& decisions) {
  const std::size_t n = env.arms();
  const std::size_t k = env.instance().k();
  if (!initialize(env, cfg.pull_cap)) return finish(env, {}, 0, true, std::nullopt);

  std::vector<double> means(n);
  for (std::size_t i = 0; i < n; ++i) means[i] = env.empirical_mean(i);

  // LIL radii depend only on (T_i, side), so they are cached per arm.
  const bool lil_based = cfg.algorithm != Algorithm::LUCB;
  std::vector<double> r_high(n), r_low(n);
  auto refresh = [&](std::size_t i) {
    means[i] = env.empirical_mean(i);
    if (!lil_based) return;
    const auto t = env.pulls(i);
    r_high[i] = baseline_radius(cfg.algorithm, t, 0, cfg.delta, n, k, true, cfg.lil);
    r_low[i] = baseline_radius(cfg.algorithm, t, 0, cfg.delta, n, k, false, cfg.lil);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::vector<std::size_t> order;
  std::vector<char> in_high(n);
  std::uint64_t rounds = 0;
  for (;;) {
    ++rounds;
    select_top_k(means, k, order);
    std::fill(in_high.begin(), in_high.end(), 0);
    for (std::size_t j = 0; j < k; ++j) in_high[order[j]] = 1;

    const double log_term = lil_based ? 0.0 : lucb_log_term(rounds, cfg.delta, n);
    double lcb_h = std::numeric_limits<double>::infinity();
    double ucb_l = -std::numeric_limits<double>::infinity();
    std::size_t h = 0, l = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = lil_based ? (in_high[i] ? r_high[i] : r_low[i])
                                 : lucb_radius(log_term, env.pulls(i), cfg.lil.sigma);
      if (in_high[i]) {
        if (means[i] - r < lcb_h) {
          lcb_h = means[i] - r;
          h = i;
        }
      } else if (means[i] + r > ucb_l) {
        ucb_l = means[i] + r;
        l = i;
      }
    }

    if (lcb_h >= ucb_l) {
      ArmSet high(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(high.begin(), high.end());
      return finish(env, std::move(high), rounds, false, StopCertificate{lcb_h, ucb_l});
    }

    const std::uint64_t needed = cfg.algorithm == Algorithm::LilRandLUCB ? 1 : 2;
    if (env.total_pulls() + needed > cfg.pull_cap) {
      ArmSet high(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
      std::sort(high.begin(), high.end());
      return finish(env, std::move(high), rounds, true, std::nullopt);
    }

    if (cfg.algorithm == Algorithm::LilRandLUCB) {
      const auto arm = rand_choice(env.pulls(h), env.pulls(l), uniform01(decisions)) == Pick::SampleH ? h : l;
      env.pull(arm);
      refresh(arm);
    } else {
      env.pull(h);
      env.pull(l);
      refresh(h);
      refresh(l);
    }
  }
}

RunResult run_clucb(const AlgoConfig& cfg, SamplingEnv& env) {
  const std::size_t n = env.arms();
  const std::size_t k = env.instance().k();
  if (!initialize(env, cfg.pull_cap)) return finish(env, {}, 0, true, std::nullopt);

  const double omega = cfg.delta / static_cast<double>(n);
  std::vector<double> means(n), radii(n);
  auto refresh = [&](std::size_t i) {
    means[i] = env.empirical_mean(i);
    radii[i] = radius(env.pulls(i), omega, cfg.lil);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::uint64_t rounds = 0;
  for (;;) {
    ++rounds;
    auto step = clucb_step(means, radii, k);
    if (step.stop) {
      StopCertificate cert{std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
      for (std::size_t i = 0; i < n; ++i) {
        if (std::binary_search(step.m.begin(), step.m.end(), i)) {
          cert.min_lcb = std::min(cert.min_lcb, means[i] - radii[i]);
        } else {
          cert.max_ucb = std::max(cert.max_ucb, means[i] + radii[i]);
        }
      }
      return finish(env, std::move(step.m), rounds, false, cert);
    }
    if (env.total_pulls() + 1 > cfg.pull_cap) return finish(env, std::move(step.m), rounds, true, std::nullopt);
    env.pull(*step.sampled_arm);
    refresh(*step.sampled_arm);
  }
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  for (const auto& e : kAlgorithms) {
    if (e.algorithm == algorithm) return e.name;
  }
  throw std::logic_error("algorithm_name: unknown algorithm");
}

Algorithm parse_algorithm(std::string_view name) {
  for (const auto& e : kAlgorithms) {
    if (e.name == name) return e.algorithm;
  }
  throw std::invalid_argument(fmt::format("unknown algorithm '{}'", name));
}

std::string_view mode_name(Mode mode) { return mode == Mode::Faithful ? "faithful" : "heuristic"; }

Mode parse_mode(std::string_view name) {
  if (name == "faithful") return Mode::Faithful;
  if (name == "heuristic") return Mode::Heuristic;
  throw std::invalid_argument(fmt::format("unknown mode '{}' (expected faithful|heuristic)", name));
}

void validate(const AlgoConfig& config, const Instance& instance) {
  if (!(config.delta > 0.0 && config.delta < 1.0)) {
    throw std::invalid_argument(fmt::format("AlgoConfig: delta={} outside (0, 1)", config.delta));
  }
  if (config.pull_cap < instance.size()) {
    throw std::invalid_argument(
        fmt::format("AlgoConfig: pull_cap={} below N={}", config.pull_cap, instance.size()));
  }
  if (config.algorithm == Algorithm::LilUCB && instance.k() != 1) {
    throw std::invalid_argument(fmt::format("AlgoConfig: lil_ucb requires K = 1, got K={}", instance.k()));
  }
  if (config.algorithm == Algorithm::LilUCB && !(config.lilucb_beta > 0.0 && config.lilucb_lambda > 0.0)) {
    throw std::invalid_argument("AlgoConfig: lil_ucb beta and lambda must be > 0");
  }
}

RunResult run(const AlgoConfig& config, SamplingEnv& env, Rng& decisions) {
  validate(config, env.instance());
  if (is_lucb_family(config.algorithm)) return run_lucb_family(config, env, decisions);
  if (config.algorithm == Algorithm::LilCLUCB) return run_clucb(config, env);
  return lilucb_run(config, env);
}

Partition partition_high_low(std::span<const double> empirical_means, std::size_t k) {
  if (k < 1 || k >= empirical_means.size()) {
    throw std::invalid_argument(fmt::format("partition_high_low: k={} outside [1, N-1]", k));
  }
  Partition p;
  p.high = top_k_set(empirical_means, k);
  for (std::size_t i = 0; i < empirical_means.size(); ++i) {
    if (!std::binary_search(p.high.begin(), p.high.end(), i)) p.low.push_back(i);
  }
  return p;
}

double confidence_split(bool arm_in_high, double delta, std::size_t n, std::size_t k) {
  if (k < 1 || k >= n) throw std::invalid_argument(fmt::format("confidence_split: k={} outside [1, {}]", k, n - 1));
  return arm_in_high ? delta / (2.0 * static_cast<double>(n - k)) : delta / (2.0 * static_cast<double>(k));
}

Marginals marginal_arms(std::span<const double> means, std::span<const double> radii,
                        const Partition& partition) {
  if (partition.high.empty() || partition.low.empty()) {
    throw std::invalid_argument("marginal_arms: High and Low must be nonempty");
  }
  Marginals m;
  m.lcb_h = std::numeric_limits<double>::infinity();
  m.ucb_l = -std::numeric_limits<double>::infinity();
  for (auto i : partition.high) {
    if (means[i] - radii[i] < m.lcb_h) {
      m.lcb_h = means[i] - radii[i];
      m.h = i;
    }
  }
  for (auto i : partition.low) {
    if (means[i] + radii[i] > m.ucb_l) {
      m.ucb_l = means[i] + radii[i];
      m.l = i;
    }
  }
  return m;
}

Pick rand_choice(std::uint64_t t_h, std::uint64_t t_l, double u) {
  const double threshold = static_cast<double>(t_l) / static_cast<double>(t_h + t_l);
  return u < threshold ? Pick::SampleH : Pick::SampleL;
}

double baseline_radius(Algorithm algorithm, std::uint64_t t, std::uint64_t round, double delta,
                       std::size_t n, std::size_t k, bool in_high, const LilParams& lil) {
  switch (algorithm) {
    case Algorithm::LilRandLUCB:
    case Algorithm::LUCBPlusPlus:
      return radius(t, confidence_split(in_high, delta, n, k), lil);
    case Algorithm::LilLUCB:
    case Algorithm::LilCLUCB:
    case Algorithm::LilUCB:
      return radius(t, delta / static_cast<double>(n), lil);
    case Algorithm::LUCB:
      if (round == 0) throw std::invalid_argument("baseline_radius: LUCB needs round >= 1");
      return lucb_radius(lucb_log_term(round, delta, n), t, lil.sigma);
  }
  throw std::logic_error("baseline_radius: unknown algorithm");
}

std::vector<double> round_radii(Algorithm algorithm, std::span<const std::uint64_t> pulls,
                                const Partition& partition, std::uint64_t round, double delta,
                                const LilParams& lil) {
  const std::size_t n = pulls.size();
  const std::size_t k = partition.high.size();
  std::vector<double> radii(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = std::binary_search(partition.high.begin(), partition.high.end(), i);
    radii[i] = baseline_radius(algorithm, pulls[i], round, delta, n, k, high, lil);
  }
  return radii;
}

RoundView evaluate_lucb_round(Algorithm algorithm, std::span<const double> means,
                              std::span<const std::uint64_t> pulls, std::size_t k,
                              std::uint64_t round, double delta, const LilParams& lil) {
  RoundView view;
  view.partition = partition_high_low(means, k);
  view.radii = round_radii(algorithm, pulls, view.partition, round, delta, lil);
  view.marginals = marginal_arms(means, view.radii, view.partition);
  view.stop = stopping_met(view.marginals);
  return view;
}

ArmSet symmetric_difference(const ArmSet& a, const ArmSet& b) {
  ArmSet out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t widest_arm(std::span<const std::size_t> candidates, std::span<const double> radii) {
  if (candidates.empty()) throw std::invalid_argument("widest_arm: no candidates");
  std::size_t best = candidates.front();
  for (auto i : candidates) {
    if (radii[i] > radii[best] || (radii[i] == radii[best] && i < best)) best = i;
  }
  return best;
}

ClucbStep clucb_step(std::span<const double> means, std::span<const double> radii, std::size_t k) {
  ClucbStep step;
  step.m = top_k_set(means, k);
  std::vector<double> revised(means.begin(), means.end());
  for (std::size_t i = 0; i < revised.size(); ++i) {
    const bool in_m = std::binary_search(step.m.begin(), step.m.end(), i);
    revised[i] += in_m ? -radii[i] : radii[i];
  }
  step.m_tilde = top_k_set(revised, k);
  step.stop = step.m == step.m_tilde;
  if (!step.stop) step.sampled_arm = widest_arm(symmetric_difference(step.m, step.m_tilde), radii);
  return step;
}

RunResult lilucb_run(const AlgoConfig& config, SamplingEnv& env) {
  validate(AlgoConfig{.algorithm = Algorithm::LilUCB,
                      .delta = config.delta,
                      .lil = config.lil,
                      .mode = config.mode,
                      .pull_cap = config.pull_cap,
                      .lilucb_beta = config.lilucb_beta,
                      .lilucb_lambda = config.lilucb_lambda},
           env.instance());
  const std::size_t n = env.arms();
  if (!initialize(env, config.pull_cap)) return finish(env, {}, 0, true, std::nullopt);

  const double omega = config.delta / static_cast<double>(n);
  const double inflation = 1.0 + config.lilucb_beta;
  std::vector<double> index(n);
  auto refresh = [&](std::size_t i) {
    index[i] = env.empirical_mean(i) + inflation * radius(env.pulls(i), omega, config.lil);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);

  std::uint64_t rounds = 0;
  for (;;) {
    ++rounds;
    const auto total = static_cast<double>(env.total_pulls());
    for (std::size_t i = 0; i < n; ++i) {
      const auto t = static_cast<double>(env.pulls(i));
      if (t >= 1.0 + config.lilucb_lambda * (total - t)) return finish(env, ArmSet{i}, rounds, false, std::nullopt);
    }
    const auto best = static_cast<std::size_t>(
        std::distance(index.begin(), std::max_element(index.begin(), index.end())));
    if (env.total_pulls() + 1 > config.pull_cap) return finish(env, ArmSet{best}, rounds, true, std::nullopt);
    env.pull(best);
    refresh(best);
  }
}

double predicted_budget(const Instance& instance, double delta, const LilParams& lil) {
  const auto profile = gaps(instance);
  const double omega = delta / (2.0 * static_cast<double>(instance.size()));
  double budget = 0.0;
  for (double g : profile.gaps) budget += 2.0 * static_cast<double>(threshold_time(g / 8.0, omega, lil));
  return budget;
}

}  // namespace purex
