#pragma once

// Best-K-Arm algorithms behind one run interface.
//
// LUCB family (lil'RandLUCB, LUCB++, lil'LUCB, LUCB): split arms into the K
// empirically best (High) and the rest (Low), find the marginal arms h (lowest
// LCB in High) and l (highest UCB in Low), stop once LCB(h) >= UCB(l).
// lil'RandLUCB pulls one of h, l at random, weighted toward the less sampled;
// the baselines pull both. lil'CLUCB compares the empirical top-K with the
// top-K of pessimistically revised means and samples the widest arm in their
// symmetric difference. lil'UCB is the Best-1 baseline with a count-based
// stopping rule.
//
// Ties everywhere go to the lowest arm index.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "purex/bandit_core.hpp"
#include "purex/lil_bounds.hpp"

namespace purex {

enum class Algorithm { LilRandLUCB, LilCLUCB, LUCB, LUCBPlusPlus, LilLUCB, LilUCB };
enum class Mode { Faithful, Heuristic };

std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
std::string_view mode_name(Mode mode);
Mode parse_mode(std::string_view name);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::LilRandLUCB;
  double delta = 0.01;
  LilParams lil{};
  Mode mode = Mode::Heuristic;
  std::uint64_t pull_cap = 100'000'000;
  double lilucb_beta = 1.0;
  double lilucb_lambda = 9.0;
};

/// Throws std::invalid_argument for delta outside (0,1), pull_cap < N, or
/// lil'UCB with K != 1.
void validate(const AlgoConfig& config, const Instance& instance);

/// Marginal bounds at the stopping round: min LCB over the output set and
/// max UCB over its complement, under the algorithm's own radii.
struct StopCertificate {
  double min_lcb = 0.0;
  double max_ucb = 0.0;
};

struct RunResult {
  ArmSet output;
  std::uint64_t total_samples = 0;
  std::vector<std::uint64_t> per_arm_samples;
  bool correct = false;
  bool capped = false;
  std::uint64_t rounds = 0;
  std::optional<StopCertificate> certificate;
};

/// Runs `config.algorithm` on a fresh environment to its stopping rule or
/// the pull cap. Rewards come from `env`, randomized sampling decisions from
/// `decisions`.
RunResult run(const AlgoConfig& config, SamplingEnv& env, Rng& decisions);

// ---- per-round building blocks -------------------------------------------

struct Partition {
  ArmSet high;
  ArmSet low;
};

/// High = K arms with the largest values (lowest index wins ties).
Partition partition_high_low(std::span<const double> empirical_means, std::size_t k);

/// delta/(2(N-K)) for High members, delta/(2K) for Low members.
double confidence_split(bool arm_in_high, double delta, std::size_t n, std::size_t k);

struct Marginals {
  std::size_t h = 0;
  std::size_t l = 0;
  double lcb_h = 0.0;
  double ucb_l = 0.0;
};

Marginals marginal_arms(std::span<const double> means, std::span<const double> radii,
                        const Partition& partition);

inline bool stopping_met(const Marginals& m) { return m.lcb_h >= m.ucb_l; }

enum class Pick { SampleH, SampleL };

/// SampleH iff u < t_l / (t_h + t_l).
Pick rand_choice(std::uint64_t t_h, std::uint64_t t_l, double u);

/// Confidence radius used by a LUCB-family algorithm (or lil'CLUCB, which
/// uses delta/N for every arm). `round` is only read by LUCB.
double baseline_radius(Algorithm algorithm, std::uint64_t t, std::uint64_t round, double delta,
                       std::size_t n, std::size_t k, bool in_high, const LilParams& lil);

/// Radii of every arm for one round of a LUCB-family algorithm.
std::vector<double> round_radii(Algorithm algorithm, std::span<const std::uint64_t> pulls,
                                const Partition& partition, std::uint64_t round, double delta,
                                const LilParams& lil);

struct RoundView {
  Partition partition;
  std::vector<double> radii;
  Marginals marginals;
  bool stop = false;
};

/// Reference evaluation of one LUCB-family round from raw statistics.
RoundView evaluate_lucb_round(Algorithm algorithm, std::span<const double> means,
                              std::span<const std::uint64_t> pulls, std::size_t k,
                              std::uint64_t round, double delta, const LilParams& lil);

struct ClucbStep {
  bool stop = false;
  std::optional<std::size_t> sampled_arm;
  ArmSet m;        // empirical top-K
  ArmSet m_tilde;  // top-K of revised means
};

/// One lil'CLUCB decision from means and radii.
ClucbStep clucb_step(std::span<const double> means, std::span<const double> radii, std::size_t k);

/// Argmax of `radii` over `candidates` (lowest index on ties).
std::size_t widest_arm(std::span<const std::size_t> candidates, std::span<const double> radii);

/// Symmetric difference of two sorted sets, sorted.
ArmSet symmetric_difference(const ArmSet& a, const ArmSet& b);

/// lil'UCB (K = 1): pull argmax mu_hat + (1+beta) U(T_i, delta/N) until some
/// arm holds T_i >= 1 + lambda * sum_{j != i} T_j.
RunResult lilucb_run(const AlgoConfig& config, SamplingEnv& env);

/// Sum_i 2 * tau_i with tau_i the first t where U(t, delta/(2N)) < gap_i / 8.
double predicted_budget(const Instance& instance, double delta, const LilParams& lil);

}  // namespace purex
