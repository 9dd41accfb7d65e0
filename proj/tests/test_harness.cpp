#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "purex/csv_io.hpp"
#include "purex/experiment.hpp"
#include "purex/lil_validity.hpp"

using namespace purex;
using nlohmann::json;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.families = {FamilySpec{Family::OneSparseK, 0.3, KRule::Fixed, 2}};
  c.n_values = {8};
  c.algorithms = {{Algorithm::LilRandLUCB, false}};
  c.trials = 3;
  c.master_seed = 11;
  c.record_wall_time = false;
  return c;
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_trials_csv(out, records);
  return out.str();
}

TrialRecord record(std::uint64_t samples, bool correct, bool capped) {
  TrialRecord r;
  r.algorithm = "lucb";
  r.family = "one_sparse_k";
  r.n = 4;
  r.k = 2;
  r.total_samples = samples;
  r.correct = correct;
  r.capped = capped;
  return r;
}

std::string error_of(const json& j) {
  try {
    config_from_json(j);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

const json kMinimal = {
    {"families", {{{"family", "one_sparse_k"}, {"k", 2}}}}, {"n_values", {8}}, {"algorithms", {"lil_rand_lucb"}}};

}  // namespace

TEST(Experiment, Cardinality) {
  const auto records = run_experiment(small_config());
  ASSERT_EQ(records.size(), 3u);
  for (std::uint64_t t = 0; t < 3; ++t) {
    EXPECT_EQ(records[t].trial, t);
    EXPECT_EQ(records[t].algorithm, "lil_rand_lucb");
    EXPECT_EQ(records[t].n, 8u);
    EXPECT_EQ(records[t].k, 2u);
    EXPECT_GE(records[t].total_samples, 8u);
  }
}

TEST(Experiment, ByteIdenticalCsv) {
  auto c = small_config();
  c.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LUCB, false}, {Algorithm::LilCLUCB, true}};
  c.n_values = {6, 10};
  EXPECT_EQ(to_csv(run_experiment(c)), to_csv(run_experiment(c)));
}

TEST(Experiment, SerialEqualsParallel) {
  auto c = small_config();
  c.families.push_back(FamilySpec{Family::AlphaExponential, 0.5, KRule::HalfN, 0});
  c.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LUCBPlusPlus, false}, {Algorithm::LilCLUCB, false}};
  c.n_values = {6, 12};
  c.trials = 8;
  const auto parallel = run_experiment(c);
  EXPECT_EQ(parallel, run_experiment_serial(c));

  setenv("PUREX_THREADS", "1", 1);
  const auto single = run_experiment(c);
  unsetenv("PUREX_THREADS");
  EXPECT_EQ(parallel, single);
}

TEST(Experiment, AlgorithmsShareCellSeeds) {
  auto c = small_config();
  c.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LUCB, false}};
  const auto records = run_experiment(c);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(records[t].seed, records[t + 3].seed);
  EXPECT_EQ(records[0].seed, trial_seed(11, 0, 0));
}

TEST(Experiment, AccountingMatchesDetail) {
  const auto c = small_config();
  const auto cells = expand_cells(c);
  for (std::uint64_t t = 0; t < 3; ++t) {
    RunResult detail;
    const auto rec = run_trial(c, cells[0], 0, c.algorithms[0], t, &detail);
    EXPECT_EQ(rec.total_samples,
              std::accumulate(detail.per_arm_samples.begin(), detail.per_arm_samples.end(), std::uint64_t{0}));
  }
}

TEST(Experiment, ZeroVarianceLabelShuffle) {
  // At sigma = 0 every shuffled instance is solved in N pulls and correctly.
  auto c = small_config();
  c.sigma = 0.0;
  c.trials = 10;
  c.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LilCLUCB, false}, {Algorithm::LilCLUCB, true}};
  for (const auto& r : run_experiment(c)) {
    EXPECT_EQ(r.total_samples, 8u);
    EXPECT_TRUE(r.correct);
  }
}

TEST(Experiment, ShuffleRelabelsOutput) {
  auto c = small_config();
  c.sigma = 0.0;
  const auto cells = expand_cells(c);
  RunResult a, b;
  run_trial(c, cells[0], 0, c.algorithms[0], 0, &a);
  run_trial(c, cells[0], 0, c.algorithms[0], 1, &b);
  // Different trials see different labelings of the same instance.
  EXPECT_TRUE(a.correct && b.correct);
  EXPECT_EQ(a.output.size(), 2u);
  c.shuffle_labels = false;
  run_trial(c, cells[0], 0, c.algorithms[0], 0, &a);
  EXPECT_EQ(a.output, (ArmSet{0, 1}));
}

TEST(Experiment, ResolveModes) {
  auto c = small_config();
  auto r = resolve_algo_config(c, {Algorithm::LilRandLUCB, false}, 16);
  EXPECT_EQ(r.algo.delta, 0.01);
  EXPECT_EQ(r.algo.lil.epsilon, 0.0);
  EXPECT_FALSE(r.form.has_value());

  c.mode = Mode::Faithful;
  r = resolve_algo_config(c, {Algorithm::LilRandLUCB, false}, 16);
  EXPECT_EQ(*r.form, DeltaForm::LinearDelta);
  EXPECT_EQ(r.algo.lil.epsilon, 0.01);
  EXPECT_DOUBLE_EQ(r.algo.delta, faithful_delta(0.01, 0.01, DeltaForm::LinearDelta, 16));
  EXPECT_LE(r.error_bound, 0.01 * (1 + 1e-12));

  r = resolve_algo_config(c, {Algorithm::LilCLUCB, false}, 16);
  EXPECT_EQ(*r.form, DeltaForm::CLUCBForm);
  r = resolve_algo_config(c, {Algorithm::LUCB, false}, 16);
  EXPECT_EQ(r.algo.delta, 0.01);
}

TEST(Aggregate, Arithmetic) {
  const std::vector<TrialRecord> records{record(10, true, false), record(20, true, true)};
  const auto rows = aggregate(records);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].mean_samples, 15.0);
  EXPECT_DOUBLE_EQ(rows[0].stderr_samples, 5.0);
  EXPECT_EQ(rows[0].accuracy, 1.0);
  EXPECT_EQ(rows[0].capped, 1u);
  EXPECT_EQ(rows[0].trials, 2u);
  EXPECT_EQ(rows[0].mode, "heuristic");
}

TEST(Aggregate, GroupsAndAccuracy) {
  auto other = record(7, false, false);
  other.algorithm = "lucb_pp";
  const std::vector<TrialRecord> records{record(10, true, false), other, record(30, false, true)};
  const auto rows = aggregate(records);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].algorithm, "lucb");
  EXPECT_EQ(rows[0].accuracy, 0.5);
  EXPECT_EQ(rows[1].algorithm, "lucb_pp");
  EXPECT_EQ(rows[1].stderr_samples, 0.0);
}

TEST(Csv, EmptyIsHeaderOnly) {
  EXPECT_EQ(to_csv({}), std::string(kTrialHeader) + "\n");
  std::ostringstream out;
  write_summary_csv(out, {});
  EXPECT_EQ(out.str(), std::string(kSummaryHeader) + "\n");
}

TEST(Csv, TrialRoundTrip) {
  auto c = small_config();
  c.record_wall_time = true;
  c.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LUCB, false}};
  const auto records = run_experiment(c);
  std::istringstream in(to_csv(records));
  EXPECT_EQ(read_trials_csv(in), records);
}

TEST(Csv, SummaryRoundTrip) {
  auto c = small_config();
  c.trials = 7;
  const auto rows = aggregate(run_experiment(c));
  std::ostringstream out;
  write_summary_csv(out, rows);
  std::istringstream in(out.str());
  EXPECT_EQ(read_summary_csv(in), rows);
}

TEST(Csv, Errors) {
  std::istringstream bad_header("algorithm,family,n,k,mode,trial,seed,total,correct,capped,wall_time_ns\n");
  try {
    read_trials_csv(bad_header);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("total_samples"), std::string::npos);
  }
  std::istringstream bad_field(std::string(kTrialHeader) + "\nlucb,f,4,2,heuristic,0,1,x,1,0,0\n");
  try {
    read_trials_csv(bad_field);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("total_samples"), std::string::npos);
  }
}

TEST(Config, DefaultsAndEcho) {
  const auto c = config_from_json(kMinimal);
  EXPECT_EQ(c.trials, 100u);
  EXPECT_EQ(c.nu, 0.01);
  EXPECT_EQ(c.sigma, 0.5);
  EXPECT_EQ(c.mode, Mode::Heuristic);
  EXPECT_EQ(c.pull_cap, 100'000'000u);
  const auto echoed = config_from_json(config_to_json(c));
  EXPECT_EQ(config_to_json(echoed), config_to_json(c));

  const auto resolved = resolved_config(c);
  ASSERT_EQ(resolved["cells"].size(), 1u);
  EXPECT_EQ(resolved["cells"][0]["algorithms"][0]["delta"], 0.01);
}

TEST(Config, UnknownKeyNamed) {
  auto j = kMinimal;
  j["trails"] = 5;
  EXPECT_NE(error_of(j).find("'trails'"), std::string::npos);
  j = kMinimal;
  j["families"][0]["kk"] = 1;
  EXPECT_NE(error_of(j).find("'kk'"), std::string::npos);
}

TEST(Config, FieldErrors) {
  auto j = kMinimal;
  j["trials"] = "many";
  EXPECT_NE(error_of(j).find("'trials'"), std::string::npos);
  j = kMinimal;
  j["trials"] = 0;
  EXPECT_NE(error_of(j).find("'trials'"), std::string::npos);
  j = kMinimal;
  j.erase("families");
  EXPECT_NE(error_of(j).find("'families'"), std::string::npos);
  j = kMinimal;
  j["families"][0]["k_rule"] = "half_n";
  j["n_values"] = {7};
  EXPECT_NE(error_of(j).find("half_n"), std::string::npos);
  j = kMinimal;
  j["algorithms"] = {"lil_ucb"};
  EXPECT_NE(error_of(j).find("lil_ucb"), std::string::npos);
}

TEST(Config, DecisionClassAndFaithful) {
  auto j = kMinimal;
  j["mode"] = "faithful";
  j["algorithms"] = {"lil_clucb", "lil_clucb_general"};
  j["decision_class"] = {{"kind", "explicit"}, {"members", {{0, 1}, {2, 3}, {0, 4}}}, {"width_hint", 2}};
  const auto c = config_from_json(j);
  ASSERT_TRUE(c.decision_class.has_value());
  EXPECT_EQ(c.decision_class->members.size(), 3u);
  EXPECT_TRUE(c.algorithms[1].oracle_driven);
  const auto resolved = resolved_config(c);
  EXPECT_EQ(resolved["cells"][0]["algorithms"][0]["bound_form"], "clucb_form");
  EXPECT_LE(resolved["cells"][0]["algorithms"][0]["error_bound"].get<double>(), 0.01 * (1 + 1e-12));
}

TEST(Config, LoadFileErrors) {
  const auto path = std::filesystem::temp_directory_path() / "purex_bad_config.json";
  {
    std::ofstream out(path);
    out << "{\"families\": [,]}";
  }
  try {
    load_config(path);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("purex_bad_config.json"), std::string::npos);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), std::runtime_error);
}

TEST(LilValidity, ZeroNoise) {
  EXPECT_EQ(lil_validity_check(LilParams{0.0, 0.0, RadiusVariant::Shifted}, 0.01, 1000, 100, 1), 0.0);
}

TEST(LilValidity, SerialEqualsParallelAndMonotoneInDelta) {
  const LilParams p{0.0, 0.5, RadiusVariant::Shifted};
  const double a = lil_validity_check(p, 0.05, 2000, 2000, 3);
  EXPECT_EQ(a, lil_validity_check_serial(p, 0.05, 2000, 2000, 3));
  EXPECT_GE(lil_validity_check(p, 0.1, 2000, 2000, 3), a);
  EXPECT_LE(a, 0.05);
}

TEST(LilValidity, OriginalFallsBackWhereUndefined) {
  // Original is undefined at t = 1 for eps = 0; the check still runs.
  const LilParams p{0.0, 0.5, RadiusVariant::Original};
  EXPECT_NO_THROW(lil_validity_check(p, 0.01, 100, 50, 1));
}
