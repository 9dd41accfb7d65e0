#pragma once

// Combinatorial pure exploration: decision classes with a maximization
// oracle, CPE gaps, width bounds, and lil'CLUCB driven by oracle calls.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "purex/bandit_core.hpp"
#include "purex/topk_algorithms.hpp"

namespace purex {

/// Rank-query contract. Feasible sets of a matroid class are its independent
/// sets.
class Matroid {
 public:
  virtual ~Matroid() = default;
  virtual std::size_t ground_size() const = 0;
  virtual std::size_t rank(std::span<const std::size_t> subset) const = 0;

  bool independent(std::span<const std::size_t> subset) const { return rank(subset) == subset.size(); }
};

/// Independent sets are those with at most `r` elements.
class UniformMatroid final : public Matroid {
 public:
  UniformMatroid(std::size_t n, std::size_t r);
  std::size_t ground_size() const override { return n_; }
  std::size_t rank(std::span<const std::size_t> subset) const override;

 private:
  std::size_t n_;
  std::size_t r_;
};

/// Each arm belongs to one block; at most capacity[b] arms per block.
class PartitionMatroid final : public Matroid {
 public:
  PartitionMatroid(std::vector<std::size_t> block_of, std::vector<std::size_t> capacity);
  std::size_t ground_size() const override { return block_of_.size(); }
  std::size_t rank(std::span<const std::size_t> subset) const override;

 private:
  std::vector<std::size_t> block_of_;
  std::vector<std::size_t> capacity_;
};

class DecisionClass {
 public:
  enum class Kind { Explicit, TopK, Matroid };

  /// Members are normalized (sorted, deduplicated). Requires at least two
  /// distinct nonempty members, all within [0, n).
  static DecisionClass explicit_sets(std::size_t n, std::vector<ArmSet> members,
                                     std::optional<std::size_t> width_hint = std::nullopt);
  static DecisionClass top_k(std::size_t n, std::size_t k);
  static DecisionClass matroid(std::shared_ptr<const Matroid> m,
                               std::optional<std::size_t> width_hint = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  std::size_t arms() const noexcept { return n_; }
  std::size_t k() const noexcept { return k_; }
  const std::vector<ArmSet>& members() const noexcept { return members_; }
  const Matroid* matroid_ptr() const noexcept { return matroid_.get(); }
  std::optional<std::size_t> width_hint() const noexcept { return width_hint_; }

 private:
  DecisionClass() = default;

  Kind kind_ = Kind::TopK;
  std::size_t n_ = 0;
  std::size_t k_ = 0;
  std::vector<ArmSet> members_;
  std::shared_ptr<const Matroid> matroid_;
  std::optional<std::size_t> width_hint_;
};

/// argmax over feasible M of sum_{i in M} weights[i]; among equal totals the
/// lexicographically smallest set wins.
ArmSet oracle_max(const DecisionClass& dc, std::span<const double> weights);

/// Every feasible set. TopK and Matroid classes are materialized, so this is
/// meant for small N (throws std::length_error above 20 arms).
std::vector<ArmSet> enumerate_feasible(const DecisionClass& dc);

struct CpeGapProfile {
  std::vector<double> gaps;
  std::vector<bool> unbounded;  // gap is +inf: no feasible set disagrees with OPT on the arm
  ArmSet opt_set;
  double opt_value = 0.0;
};

/// Gaps by brute force over an explicit list of feasible sets.
CpeGapProfile brute_force_gaps(std::span<const ArmSet> feasible, std::span<const double> means);

/// Closed form for TopK, brute force otherwise. Throws std::domain_error if
/// the optimum is not unique.
CpeGapProfile cpe_gaps(const DecisionClass& dc, std::span<const double> means);

/// width_hint if supplied; 2 for TopK and matroids; N for explicit classes.
std::size_t width_bound(const DecisionClass& dc);

/// width^2 sigma^2 sum_i gap_i^-2 (log(1/delta) + log N + log log(1/gap_i)),
/// skipping unbounded gaps and clamping the log log term at zero.
double cpe_complexity(const DecisionClass& dc, std::span<const double> means, double sigma, double delta);

/// lil'CLUCB with M_t and its revised counterpart obtained from the oracle.
/// `correct` compares against oracle_max on the true means.
RunResult run_general_clucb(const DecisionClass& dc, const AlgoConfig& config, SamplingEnv& env);

}  // namespace purex
