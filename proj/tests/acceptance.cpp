// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "purex/cpe.hpp"
#include "purex/experiment.hpp"
#include "purex/lil_validity.hpp"

using namespace purex;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  fmt::print("{} criterion {}: {} | {}\n", pass ? "PASS" : "FAIL", id, what, detail);
  std::fflush(stdout);
  if (!pass) ++failures;
}

const std::vector<AlgorithmChoice> kFive{{Algorithm::LilRandLUCB, false}, {Algorithm::LilCLUCB, false},
                                         {Algorithm::LUCB, false},        {Algorithm::LUCBPlusPlus, false},
                                         {Algorithm::LilLUCB, false}};

ExperimentConfig one_sparse(std::vector<std::size_t> n_values, KRule rule, std::size_t k, std::uint64_t trials,
                            std::uint64_t seed) {
  ExperimentConfig c;
  c.families = {FamilySpec{Family::OneSparseK, 0.3, rule, k}};
  c.n_values = std::move(n_values);
  c.algorithms = kFive;
  c.trials = trials;
  c.master_seed = seed;
  c.record_wall_time = false;
  return c;
}

std::map<std::pair<std::string, std::size_t>, SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::map<std::pair<std::string, std::size_t>, SummaryRow> out;
  for (auto& row : aggregate(records)) out[{row.algorithm, row.n}] = row;
  return out;
}

void criterion1() {
  const auto rows = summarize(run_experiment(one_sparse({32}, KRule::Fixed, 2, 100, 1)));
  bool pass = true;
  std::string detail;
  for (const auto& a : kFive) {
    const auto& row = rows.at({a.name(), 32});
    const double error = 1.0 - row.accuracy;
    pass = pass && error <= 0.01 && row.capped == 0;
    detail += fmt::format("{}={:.2f}% ", a.name(), 100.0 * error);
  }
  report(1, pass, "error rate <= 1% (OneSparseK N=32 K=2, 100 trials)", detail);
}

void criterion2() {
  const auto rows = summarize(run_experiment(one_sparse({64, 256}, KRule::Fixed, 2, 50, 2)));
  std::string detail;
  for (std::size_t n : {64u, 256u}) {
    detail += fmt::format("N={}:", n);
    for (const auto& a : kFive) detail += fmt::format(" {}={:.0f}", a.name(), rows.at({a.name(), n}).mean_samples);
    detail += "; ";
  }
  const double rand = rows.at({"lil_rand_lucb", 256}).mean_samples;
  const double pp = rows.at({"lucb_pp", 256}).mean_samples;
  const double lucb = rows.at({"lucb", 256}).mean_samples;
  const bool pass = pp >= 1.05 * rand && lucb >= 1.05 * pp;
  detail += fmt::format("N=256 separations: lucb_pp/rand={:.3f} lucb/lucb_pp={:.3f}", pp / rand, lucb / pp);
  report(2, pass, "lil_rand_lucb < lucb_pp < lucb at N=256 with >= 5% gaps", detail);
}

void criterion3() {
  auto config = one_sparse({64}, KRule::HalfN, 0, 50, 3);
  config.algorithms = {{Algorithm::LilRandLUCB, false}, {Algorithm::LUCBPlusPlus, false}, {Algorithm::LilLUCB, false}};
  const auto rows = summarize(run_experiment(config));
  const double rand = rows.at({"lil_rand_lucb", 64}).mean_samples;
  const double pp = rows.at({"lucb_pp", 64}).mean_samples;
  const double ratio = rand / pp;
  const bool within = std::abs(ratio - 1.0) <= 0.15;

  // Structural: identical radii on identical forced histories at K = N/2.
  bool radii_equal = true;
  Rng rng(33);
  for (int rep = 0; rep < 1000 && radii_equal; ++rep) {
    std::vector<double> means(64);
    std::vector<std::uint64_t> pulls(64);
    for (std::size_t i = 0; i < 64; ++i) {
      means[i] = uniform01(rng);
      pulls[i] = 1 + rng() % 5000;
    }
    const auto a = evaluate_lucb_round(Algorithm::LUCBPlusPlus, means, pulls, 32, 1, 0.01, LilParams{});
    const auto b = evaluate_lucb_round(Algorithm::LilLUCB, means, pulls, 32, 1, 0.01, LilParams{});
    radii_equal = a.radii == b.radii && a.marginals.h == b.marginals.h && a.marginals.l == b.marginals.l &&
                  a.stop == b.stop;
  }
  const double lil = rows.at({"lil_lucb", 64}).mean_samples;
  report(3, within && radii_equal && lil == pp, "lil_rand_lucb within 15% of lucb_pp at K=N/2; lucb_pp == lil_lucb",
         fmt::format("rand={:.0f} lucb_pp={:.0f} ratio={:.3f}; lil_lucb={:.0f}; forced-history radii equal={}", rand,
                     pp, ratio, lil, radii_equal));
}

void criterion4() {
  const LilParams params{0.01, 0.5, RadiusVariant::Original};
  const double delta = 0.005;
  const auto start = std::chrono::steady_clock::now();
  const double rate = lil_validity_check(params, delta, 10'000, 10'000, 4);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double theory = std::min(1.0, error_constant(0.01) * std::pow(delta, 1.01));
  report(4, rate <= theory && rate <= 0.02, "LIL violation rate <= min(1, c_eps delta^(1+eps)) and <= 0.02",
         fmt::format("rate={} bound={:.4g} time={:.1f}s", rate, theory, secs));

  // Diagnostics only: where the violations come from.
  const double r1 = radius(1, delta, params);
  fmt::print("INFO t=1 original radius={:.4f}, P(X_1 > radius)={:.4f}; delta ceiling log(1+eps)/e={:.5f}\n", r1,
             0.5 * std::erfc(r1 / (0.5 * std::sqrt(2.0))), admissible_delta_ceiling(0.01));
  fmt::print("INFO same paths, shifted radius: rate={}\n",
             lil_validity_check(LilParams{0.01, 0.5, RadiusVariant::Shifted}, delta, 10'000, 10'000, 4));
}

void criterion5() {
  Rng rng(5);
  int checked = 0, rejected = 0;
  double worst = -1e300;
  bool pass = true;
  while (checked < 500) {
    const double c = std::exp(std::log(0.005) + uniform01(rng) * (std::log(2.0) - std::log(0.005)));
    const double omega = std::exp(std::log(1e-8) * uniform01(rng));
    const double eps = 0.001 + 0.998 * uniform01(rng);
    double bound = 0.0;
    try {
      bound = lemma2_time_bound(c, omega, eps);
    } catch (const std::domain_error&) {
      ++rejected;
      continue;
    }
    const auto limit = static_cast<std::uint64_t>(4.0 * bound) + 100;
    const double t = static_cast<double>(lemma2_scan_time(c, omega, eps, limit));
    worst = std::max(worst, t - (bound + 1.0));
    pass = pass && t <= bound + 1.0;
    ++checked;
  }
  report(5, pass, "scan time <= closed-form time bound + 1 on 500 tuples",
         fmt::format("max(scan - bound - 1)={:.3f}, {} out-of-domain draws skipped", worst, rejected));
}

void criterion6() {
  auto config = one_sparse({16}, KRule::Fixed, 2, 50, 6);
  config.mode = Mode::Faithful;
  config.algorithms = {{Algorithm::LilRandLUCB, false}};
  const auto rows = aggregate(run_experiment(config));
  const auto resolved = resolve_algo_config(config, config.algorithms[0], 16);
  const double budget = predicted_budget(make_instance(Family::OneSparseK, 16, 2, 0.0), resolved.algo.delta,
                                         resolved.algo.lil);
  const double mean = rows.at(0).mean_samples;
  report(6, mean <= budget, "faithful lil_rand_lucb mean samples <= sum of 2 tau_i (OneSparseK N=16 K=2)",
         fmt::format("mean={:.0f} budget={:.0f} ratio={:.4f} delta={:.4g} accuracy={}", mean, budget, mean / budget,
                     resolved.algo.delta, rows.at(0).accuracy));
}

void criterion7() {
  auto config = one_sparse({10}, KRule::Fixed, 3, 20, 7);
  const auto cell = expand_cells(config).at(0);
  const AlgorithmChoice general{Algorithm::LilCLUCB, true};
  const AlgorithmChoice direct{Algorithm::LilCLUCB, false};
  int identical = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    RunResult a, b;
    run_trial(config, cell, 0, general, t, &a);
    run_trial(config, cell, 0, direct, t, &b);
    if (a.output == b.output && a.per_arm_samples == b.per_arm_samples && a.total_samples == b.total_samples &&
        a.rounds == b.rounds && a.correct == b.correct && a.capped == b.capped) {
      ++identical;
    }
  }
  report(7, identical == 20, "oracle-driven lil_clucb with TopK == lil_clucb (OneSparseK N=10 K=3)",
         fmt::format("{}/20 identical RunResults", identical));
}

void criterion8() {
  Rng rng(8);
  int equal = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 7;
    const std::size_t k = 1 + rng() % (n - 1);
    std::vector<double> pool(1024);
    std::iota(pool.begin(), pool.end(), 0.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> mu(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n));
    for (auto& m : mu) m /= 1024.0;

    const auto subsets = enumerate_feasible(DecisionClass::top_k(n, k));
    const auto dc = DecisionClass::explicit_sets(n, subsets);
    const auto brute = cpe_gaps(dc, mu);
    const auto closed = gaps(Instance(mu, 0.5, k));
    if (brute.gaps == closed.gaps) ++equal;
  }
  report(8, equal == 100, "brute-force CPE gaps on all-K-subsets == closed-form gaps (N <= 8)",
         fmt::format("{}/100 exact matches", equal));
}

void criterion9() {
  Rng rng(9);
  int runs = 0, ok = 0;
  std::string bad;
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 2 + rng() % 15;
    const std::size_t k = 1 + rng() % (n - 1);
    std::vector<double> mu(n);
    std::iota(mu.begin(), mu.end(), 0.0);
    std::shuffle(mu.begin(), mu.end(), rng);
    const Instance inst(mu, 0.0, k);
    AlgoConfig cfg;
    cfg.lil.sigma = 0.0;
    for (const auto& a : kFive) {
      cfg.algorithm = a.algorithm;
      SamplingEnv env(inst, 1);
      Rng d(2);
      const auto r = run(cfg, env, d);
      ++runs;
      if (r.total_samples == n && r.correct) {
        ++ok;
      } else if (bad.empty()) {
        bad = fmt::format(" first miss: {} N={} K={} samples={}", a.name(), n, k, r.total_samples);
      }
    }
    SamplingEnv env(inst, 1);
    const auto r = run_general_clucb(DecisionClass::top_k(n, k), cfg, env);
    ++runs;
    if (r.total_samples == n && r.correct) ++ok;
  }
  report(9, ok == runs, "sigma=0, distinct means: exactly N samples and the correct set",
         fmt::format("{}/{} runs (five Best-K algorithms + oracle-driven lil_clucb){}", ok, runs, bad));

  // lil_ucb stops on a pull-count ratio, so it needs more than N pulls even at sigma = 0.
  AlgoConfig ucb;
  ucb.algorithm = Algorithm::LilUCB;
  ucb.lil.sigma = 0.0;
  SamplingEnv env(Instance({1.0, 0.0, 0.5}, 0.0, 1), 1);
  Rng d(1);
  const auto r = run(ucb, env, d);
  fmt::print("INFO lil_ucb at sigma=0, mu=[1,0,0.5]: samples={} correct={}\n", r.total_samples, r.correct);
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fmt::print("{} of 9 criteria failed ({:.1f}s)\n", failures, secs);
  return failures == 0 ? 0 : 1;
}
