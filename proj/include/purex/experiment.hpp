#pragma once

// Monte Carlo experiment harness: configuration, per-trial execution and the
// OpenMP-parallel trial loop (with its serial reference), plus aggregation.
//
// Every trial draws its seed from (master_seed, cell index, trial index), so
// records do not depend on thread count or scheduling. The cell index covers
// (family, n) only: all algorithms in a cell see the same per-trial seeds.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "purex/bandit_core.hpp"
#include "purex/cpe.hpp"
#include "purex/lil_bounds.hpp"
#include "purex/topk_algorithms.hpp"

namespace purex {

enum class KRule { Fixed, HalfN, One };

struct FamilySpec {
  Family family = Family::OneSparseK;
  double alpha = 0.3;
  KRule k_rule = KRule::Fixed;
  std::size_t k = 2;  // read for KRule::Fixed only
};

struct DecisionClassSpec {
  enum class Kind { TopK, Explicit, UniformMatroid, PartitionMatroid };
  Kind kind = Kind::TopK;
  std::vector<ArmSet> members;         // Explicit
  std::size_t rank = 1;                // UniformMatroid
  std::vector<std::size_t> blocks;     // PartitionMatroid: block id per arm
  std::vector<std::size_t> capacities; // PartitionMatroid
  std::optional<std::size_t> width_hint;
};

struct AlgorithmChoice {
  Algorithm algorithm = Algorithm::LilRandLUCB;
  bool oracle_driven = false;  // lil'CLUCB through the decision-class oracle

  std::string name() const;
  friend bool operator==(const AlgorithmChoice&, const AlgorithmChoice&) = default;
};

/// Accepts the topk algorithm names plus "lil_clucb_general".
AlgorithmChoice parse_algorithm_choice(std::string_view name);

struct ExperimentConfig {
  std::vector<FamilySpec> families;
  std::vector<std::size_t> n_values;
  std::vector<AlgorithmChoice> algorithms;
  Mode mode = Mode::Heuristic;
  double nu = 0.01;
  double epsilon_faithful = 0.01;
  std::uint64_t trials = 100;
  std::uint64_t master_seed = 0;
  std::uint64_t pull_cap = 100'000'000;
  double sigma = 0.5;
  std::string output_path = "results.csv";
  double lilucb_beta = 1.0;
  double lilucb_lambda = 9.0;
  bool shuffle_labels = true;
  bool record_wall_time = true;
  std::optional<DecisionClassSpec> decision_class;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ExperimentConfig& config);

/// Strict: unknown keys and ill-typed values are errors naming the key.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Config with defaults applied plus, per cell and algorithm, the derived
/// (delta, epsilon), the error-bound form used and its value.
nlohmann::json resolved_config(const ExperimentConfig& config);

struct Cell {
  FamilySpec family;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string family_label;  // family name, suffixed with alpha when it matters
};

std::vector<Cell> expand_cells(const ExperimentConfig& config);

struct ResolvedAlgo {
  AlgoConfig algo;
  std::optional<DeltaForm> form;  // empty when delta is used as given
  double error_bound = 0.0;       // theorem error bound at the chosen delta (faithful only)
};

/// Faithful: epsilon_faithful with delta from the algorithm's theorem form.
/// Heuristic: epsilon = 0, delta = nu. LUCB always runs at delta = nu.
ResolvedAlgo resolve_algo_config(const ExperimentConfig& config, const AlgorithmChoice& choice, std::size_t n);

DecisionClass build_decision_class(const ExperimentConfig& config, const Cell& cell);

struct TrialRecord {
  std::string algorithm;
  std::string family;
  std::size_t n = 0;
  std::size_t k = 0;
  Mode mode = Mode::Heuristic;
  std::uint64_t trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t total_samples = 0;
  bool correct = false;
  bool capped = false;
  std::int64_t wall_time_ns = 0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell_index, std::uint64_t trial);

/// One independent run; also returns the full RunResult when `detail` is set.
TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t cell_index,
                      const AlgorithmChoice& choice, std::uint64_t trial, RunResult* detail = nullptr);

/// Records ordered by (cell, algorithm, trial). Parallel over trials.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// Reference single-threaded loop; same records as run_experiment.
std::vector<TrialRecord> run_experiment_serial(const ExperimentConfig& config);

struct SummaryRow {
  std::string algorithm;
  std::string family;
  std::size_t n = 0;
  std::size_t k = 0;
  std::string mode;
  std::uint64_t trials = 0;
  double mean_samples = 0.0;
  double stderr_samples = 0.0;  // sample standard deviation / sqrt(trials)
  double accuracy = 0.0;
  std::uint64_t capped = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

/// Groups by (algorithm, family, n, k, mode) in order of first appearance.
std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records);

}  // namespace purex
