// purex: run Best-K / CPE experiments, check the LIL bound, aggregate CSVs.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "purex/csv_io.hpp"
#include "purex/experiment.hpp"
#include "purex/lil_bounds.hpp"
#include "purex/lil_validity.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> mode;
};

struct LilArgs {
  double epsilon = 0.0;
  double delta = 0.01;
  std::uint64_t horizon = 10'000;
  std::uint64_t paths = 10'000;
  double sigma = 0.5;
  std::uint64_t seed = 0;
  std::string variant = "shifted";
};

struct AggregateArgs {
  std::string in;
  std::string out;
};

int do_run(const RunArgs& a) {
  auto config = purex::load_config(a.config);
  if (a.out) config.output_path = *a.out;
  if (a.seed) config.master_seed = *a.seed;
  if (a.trials) config.trials = *a.trials;
  if (a.mode) config.mode = purex::parse_mode(*a.mode);
  purex::validate(config);

  const auto sidecar = config.output_path + ".resolved.json";
  {
    std::ofstream out(sidecar);
    if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", sidecar));
    out << purex::resolved_config(config).dump(2) << '\n';
  }

  const auto records = purex::run_experiment(config);
  purex::write_trials_csv(config.output_path, records);

  std::uint64_t wrong = 0;
  std::uint64_t capped = 0;
  for (const auto& r : records) {
    wrong += r.correct ? 0 : 1;
    capped += r.capped ? 1 : 0;
  }
  fmt::print(stderr, "{} trials -> {} ({} incorrect, {} capped)\n", records.size(), config.output_path, wrong, capped);
  return 0;
}

int do_validate_lil(const LilArgs& a) {
  purex::LilParams params;
  params.epsilon = a.epsilon;
  params.sigma = a.sigma;
  params.variant = a.variant == "original" ? purex::RadiusVariant::Original : purex::RadiusVariant::Shifted;
  const double rate = purex::lil_validity_check(params, a.delta, a.horizon, a.paths, a.seed);
  fmt::print("violation_rate {}\n", rate);
  if (a.epsilon > 0.0) {
    fmt::print("theoretical_bound {}\n", purex::error_constant(a.epsilon) * std::pow(a.delta, 1.0 + a.epsilon));
  }
  return 0;
}

int do_aggregate(const AggregateArgs& a) {
  const auto records = purex::read_trials_csv(a.in);
  const auto rows = purex::aggregate(records);
  purex::write_summary_csv(a.out, rows);
  fmt::print(stderr, "{} records -> {} rows in {}\n", records.size(), rows.size(), a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best-K-arm and combinatorial pure exploration experiments"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write per-trial CSV");
  run->add_option("--config", run_args.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_args.out, "Trial CSV path (overrides output_path)");
  run->add_option("--seed", run_args.seed, "Master seed override");
  run->add_option("--trials", run_args.trials, "Trials per cell override")->check(CLI::PositiveNumber);
  run->add_option("--mode", run_args.mode, "faithful or heuristic")->check(CLI::IsMember({"faithful", "heuristic"}));

  LilArgs lil_args;
  auto* lil = app.add_subcommand("validate-lil", "Monte Carlo violation rate of the LIL radius");
  lil->add_option("--epsilon", lil_args.epsilon, "epsilon >= 0")->required()->check(CLI::Range(0.0, 1.0));
  lil->add_option("--delta", lil_args.delta, "confidence parameter")->required()->check(CLI::Range(0.0, 1.0));
  lil->add_option("--horizon", lil_args.horizon, "path length")->required()->check(CLI::PositiveNumber);
  lil->add_option("--paths", lil_args.paths, "number of paths")->required()->check(CLI::PositiveNumber);
  lil->add_option("--sigma", lil_args.sigma, "noise scale")->capture_default_str();
  lil->add_option("--seed", lil_args.seed, "path seed")->capture_default_str();
  lil->add_option("--variant", lil_args.variant, "original or shifted")
      ->capture_default_str()
      ->check(CLI::IsMember({"original", "shifted"}));

  AggregateArgs agg_args;
  auto* agg = app.add_subcommand("aggregate", "Summarize a trial CSV per (algorithm, family, n, k, mode)");
  agg->add_option("--in", agg_args.in, "trial CSV")->required()->check(CLI::ExistingFile);
  agg->add_option("--out", agg_args.out, "summary CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(run_args);
    if (*lil) return do_validate_lil(lil_args);
    if (*agg) return do_aggregate(agg_args);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
