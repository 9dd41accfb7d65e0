#include "purex/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <tuple>

#include <fmt/format.h>

#include "purex/parallel.hpp"

namespace purex {

using nlohmann::json;

namespace {

constexpr std::string_view kGeneralClucbName = "lil_clucb_general";

// ---- strict JSON reading --------------------------------------------------

void reject_unknown(const json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw std::invalid_argument(fmt::format("config: {} must be an object", where));
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw std::invalid_argument(fmt::format("config: unknown key '{}' in {}", key, where));
    }
  }
}

template <typename T>
T read(const json& obj, std::string_view key, std::string_view where) {
  try {
    return obj.at(std::string(key)).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("config: field '{}' in {}: {}", key, where, e.what()));
  }
}

template <typename T>
void read_opt(const json& obj, std::string_view key, std::string_view where, T& out) {
  if (obj.contains(std::string(key))) out = read<T>(obj, key, where);
}

std::string_view k_rule_name(KRule r) {
  switch (r) {
    case KRule::Fixed: return "fixed";
    case KRule::HalfN: return "half_n";
    case KRule::One: return "one";
  }
  return "?";
}

KRule parse_k_rule(std::string_view s) {
  if (s == "fixed") return KRule::Fixed;
  if (s == "half_n") return KRule::HalfN;
  if (s == "one") return KRule::One;
  throw std::invalid_argument(fmt::format("config: unknown k_rule '{}' (fixed|half_n|one)", s));
}

std::string_view dc_kind_name(DecisionClassSpec::Kind k) {
  switch (k) {
    case DecisionClassSpec::Kind::TopK: return "top_k";
    case DecisionClassSpec::Kind::Explicit: return "explicit";
    case DecisionClassSpec::Kind::UniformMatroid: return "uniform_matroid";
    case DecisionClassSpec::Kind::PartitionMatroid: return "partition_matroid";
  }
  return "?";
}

DecisionClassSpec::Kind parse_dc_kind(std::string_view s) {
  for (auto k : {DecisionClassSpec::Kind::TopK, DecisionClassSpec::Kind::Explicit,
                 DecisionClassSpec::Kind::UniformMatroid, DecisionClassSpec::Kind::PartitionMatroid}) {
    if (dc_kind_name(k) == s) return k;
  }
  throw std::invalid_argument(fmt::format("config: unknown decision_class kind '{}'", s));
}

std::size_t k_for(const FamilySpec& f, std::size_t n) {
  switch (f.k_rule) {
    case KRule::Fixed: return f.k;
    case KRule::HalfN: return n / 2;
    case KRule::One: return 1;
  }
  return 0;
}

bool label_symmetric(const ExperimentConfig& config, const AlgorithmChoice& choice) {
  if (!choice.oracle_driven || !config.decision_class) return true;
  return config.decision_class->kind == DecisionClassSpec::Kind::TopK ||
         config.decision_class->kind == DecisionClassSpec::Kind::UniformMatroid;
}

}  // namespace

std::string AlgorithmChoice::name() const {
  if (oracle_driven) return std::string(kGeneralClucbName);
  return std::string(algorithm_name(algorithm));
}

AlgorithmChoice parse_algorithm_choice(std::string_view name) {
  if (name == kGeneralClucbName) return {Algorithm::LilCLUCB, true};
  return {parse_algorithm(name), false};
}

void validate(const ExperimentConfig& c) {
  auto fail = [](std::string msg) { throw std::invalid_argument("config: " + msg); };
  if (c.families.empty()) fail("'families' must be nonempty");
  if (c.n_values.empty()) fail("'n_values' must be nonempty");
  if (c.algorithms.empty()) fail("'algorithms' must be nonempty");
  if (c.trials < 1) fail("'trials' must be >= 1");
  if (!(c.nu > 0.0 && c.nu < 1.0)) fail(fmt::format("'nu'={} outside (0, 1)", c.nu));
  if (c.mode == Mode::Faithful && !(c.epsilon_faithful > 0.0 && c.epsilon_faithful < 1.0)) {
    fail(fmt::format("'epsilon_faithful'={} outside (0, 1)", c.epsilon_faithful));
  }
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) fail(fmt::format("'sigma'={} must be >= 0", c.sigma));
  if (!(c.lilucb_beta > 0.0)) fail("'lilucb_beta' must be > 0");
  if (!(c.lilucb_lambda > 0.0)) fail("'lilucb_lambda' must be > 0");

  const bool has_lilucb = std::any_of(c.algorithms.begin(), c.algorithms.end(),
                                      [](const auto& a) { return a.algorithm == Algorithm::LilUCB; });
  for (const auto& f : c.families) {
    if (family_uses_alpha(f.family) && !(f.alpha > 0.0)) {
      fail(fmt::format("family '{}': 'alpha' must be > 0", family_name(f.family)));
    }
    if (family_is_best1(f.family) && f.k_rule != KRule::One) {
      fail(fmt::format("family '{}' is Best-1 and needs k_rule 'one'", family_name(f.family)));
    }
    for (auto n : c.n_values) {
      if (n < 2) fail(fmt::format("n={} must be >= 2", n));
      if (f.k_rule == KRule::HalfN && n % 2 != 0) fail(fmt::format("k_rule half_n needs even n, got {}", n));
      const auto k = k_for(f, n);
      if (k < 1 || k > n - 1) fail(fmt::format("k={} outside [1, {}] for n={}", k, n - 1, n));
      if (has_lilucb && k != 1) fail(fmt::format("lil_ucb requires K = 1 but family '{}' gives K={}", family_name(f.family), k));
      if (c.pull_cap < n) fail(fmt::format("'pull_cap'={} below n={}", c.pull_cap, n));
    }
  }
  if (c.decision_class) {
    const auto& d = *c.decision_class;
    for (auto n : c.n_values) {
      for (const auto& m : d.members) {
        for (auto i : m) {
          if (i >= n) fail(fmt::format("decision_class member arm {} outside [0, {})", i, n));
        }
      }
      if (d.kind == DecisionClassSpec::Kind::Explicit && d.members.size() < 2) {
        fail("decision_class 'members' needs at least two sets");
      }
      if (d.kind == DecisionClassSpec::Kind::UniformMatroid && (d.rank < 1 || d.rank > n)) {
        fail(fmt::format("decision_class 'rank'={} outside [1, {}]", d.rank, n));
      }
      if (d.kind == DecisionClassSpec::Kind::PartitionMatroid) {
        if (d.blocks.size() != n) fail(fmt::format("decision_class 'blocks' has {} entries, n={}", d.blocks.size(), n));
        for (auto b : d.blocks) {
          if (b >= d.capacities.size()) fail(fmt::format("decision_class block {} has no capacity", b));
        }
      }
    }
  }
  // Surfaces faithful-delta errors at load time.
  for (const auto& a : c.algorithms) {
    for (auto n : c.n_values) resolve_algo_config(c, a, n);
  }
}

ExperimentConfig config_from_json(const json& j) {
  reject_unknown(j, "config",
                 {"families", "n_values", "algorithms", "mode", "nu", "epsilon_faithful", "trials", "master_seed",
                  "pull_cap", "sigma", "output_path", "lilucb_beta", "lilucb_lambda", "shuffle_labels",
                  "record_wall_time", "decision_class"});
  ExperimentConfig c;

  if (!j.contains("families")) throw std::invalid_argument("config: missing required key 'families'");
  const auto& families = j.at("families");
  if (!families.is_array()) throw std::invalid_argument("config: 'families' must be an array");
  for (std::size_t idx = 0; idx < families.size(); ++idx) {
    const auto& f = families[idx];
    const auto where = fmt::format("families[{}]", idx);
    reject_unknown(f, where, {"family", "alpha", "k_rule", "k"});
    FamilySpec spec;
    spec.family = parse_family(read<std::string>(f, "family", where));
    read_opt(f, "alpha", where, spec.alpha);
    spec.k_rule = family_is_best1(spec.family) ? KRule::One : KRule::Fixed;
    if (f.contains("k_rule")) spec.k_rule = parse_k_rule(read<std::string>(f, "k_rule", where));
    read_opt(f, "k", where, spec.k);
    c.families.push_back(spec);
  }
  c.n_values = read<std::vector<std::size_t>>(j, "n_values", "config");
  for (const auto& name : read<std::vector<std::string>>(j, "algorithms", "config")) {
    c.algorithms.push_back(parse_algorithm_choice(name));
  }
  if (j.contains("mode")) c.mode = parse_mode(read<std::string>(j, "mode", "config"));
  read_opt(j, "nu", "config", c.nu);
  read_opt(j, "epsilon_faithful", "config", c.epsilon_faithful);
  read_opt(j, "trials", "config", c.trials);
  read_opt(j, "master_seed", "config", c.master_seed);
  read_opt(j, "pull_cap", "config", c.pull_cap);
  read_opt(j, "sigma", "config", c.sigma);
  read_opt(j, "output_path", "config", c.output_path);
  read_opt(j, "lilucb_beta", "config", c.lilucb_beta);
  read_opt(j, "lilucb_lambda", "config", c.lilucb_lambda);
  read_opt(j, "shuffle_labels", "config", c.shuffle_labels);
  read_opt(j, "record_wall_time", "config", c.record_wall_time);

  if (j.contains("decision_class")) {
    const auto& d = j.at("decision_class");
    reject_unknown(d, "decision_class", {"kind", "members", "rank", "blocks", "capacities", "width_hint"});
    DecisionClassSpec spec;
    spec.kind = parse_dc_kind(read<std::string>(d, "kind", "decision_class"));
    read_opt(d, "members", "decision_class", spec.members);
    read_opt(d, "rank", "decision_class", spec.rank);
    read_opt(d, "blocks", "decision_class", spec.blocks);
    read_opt(d, "capacities", "decision_class", spec.capacities);
    if (d.contains("width_hint")) spec.width_hint = read<std::size_t>(d, "width_hint", "decision_class");
    c.decision_class = spec;
  }

  validate(c);
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["families"] = json::array();
  for (const auto& f : c.families) {
    json e = {{"family", family_name(f.family)}, {"k_rule", k_rule_name(f.k_rule)}};
    if (family_uses_alpha(f.family)) e["alpha"] = f.alpha;
    if (f.k_rule == KRule::Fixed) e["k"] = f.k;
    j["families"].push_back(e);
  }
  j["n_values"] = c.n_values;
  j["algorithms"] = json::array();
  for (const auto& a : c.algorithms) j["algorithms"].push_back(a.name());
  j["mode"] = mode_name(c.mode);
  j["nu"] = c.nu;
  j["epsilon_faithful"] = c.epsilon_faithful;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  j["pull_cap"] = c.pull_cap;
  j["sigma"] = c.sigma;
  j["output_path"] = c.output_path;
  j["lilucb_beta"] = c.lilucb_beta;
  j["lilucb_lambda"] = c.lilucb_lambda;
  j["shuffle_labels"] = c.shuffle_labels;
  j["record_wall_time"] = c.record_wall_time;
  if (c.decision_class) {
    const auto& d = *c.decision_class;
    json e = {{"kind", dc_kind_name(d.kind)}};
    if (!d.members.empty()) e["members"] = d.members;
    if (d.kind == DecisionClassSpec::Kind::UniformMatroid) e["rank"] = d.rank;
    if (d.kind == DecisionClassSpec::Kind::PartitionMatroid) {
      e["blocks"] = d.blocks;
      e["capacities"] = d.capacities;
    }
    if (d.width_hint) e["width_hint"] = *d.width_hint;
    j["decision_class"] = e;
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open config '{}'", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(fmt::format("config '{}': {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const auto& f : config.families) {
    std::string label(family_name(f.family));
    if (family_uses_alpha(f.family)) label += fmt::format("_a{}", f.alpha);
    for (auto n : config.n_values) cells.push_back(Cell{f, n, k_for(f, n), label});
  }
  return cells;
}

ResolvedAlgo resolve_algo_config(const ExperimentConfig& config, const AlgorithmChoice& choice, std::size_t n) {
  ResolvedAlgo r;
  auto& a = r.algo;
  a.algorithm = choice.algorithm;
  a.mode = config.mode;
  a.pull_cap = config.pull_cap;
  a.lilucb_beta = config.lilucb_beta;
  a.lilucb_lambda = config.lilucb_lambda;
  a.lil = LilParams{0.0, config.sigma, RadiusVariant::Shifted};
  a.delta = config.nu;
  if (config.mode == Mode::Heuristic || choice.algorithm == Algorithm::LUCB) return r;

  a.lil.epsilon = config.epsilon_faithful;
  const DeltaForm form = choice.algorithm == Algorithm::LilCLUCB ? DeltaForm::CLUCBForm : DeltaForm::LinearDelta;
  a.delta = faithful_delta(config.nu, config.epsilon_faithful, form, n);
  r.form = form;
  r.error_bound = theorem_error_bound(a.delta, config.epsilon_faithful, form, n);
  if (r.error_bound > config.nu * (1.0 + 1e-12)) {
    throw std::invalid_argument(fmt::format("config: faithful delta={} gives error bound {} > nu={}", a.delta,
                                            r.error_bound, config.nu));
  }
  return r;
}

json resolved_config(const ExperimentConfig& config) {
  json j = config_to_json(config);
  j["cells"] = json::array();
  for (const auto& cell : expand_cells(config)) {
    json c = {{"family", cell.family_label}, {"n", cell.n}, {"k", cell.k}, {"algorithms", json::array()}};
    for (const auto& choice : config.algorithms) {
      const auto r = resolve_algo_config(config, choice, cell.n);
      json a = {{"name", choice.name()}, {"delta", r.algo.delta}, {"epsilon", r.algo.lil.epsilon},
                {"radius_variant", "shifted"}};
      if (r.form) {
        a["bound_form"] = *r.form == DeltaForm::LinearDelta ? "linear_delta" : "clucb_form";
        a["error_bound"] = r.error_bound;
      } else {
        a["bound_form"] = "none";
      }
      if (choice.algorithm == Algorithm::LilUCB) {
        a["beta"] = config.lilucb_beta;
        a["lambda"] = config.lilucb_lambda;
      }
      c["algorithms"].push_back(a);
    }
    j["cells"].push_back(c);
  }
  return j;
}

DecisionClass build_decision_class(const ExperimentConfig& config, const Cell& cell) {
  if (!config.decision_class) return DecisionClass::top_k(cell.n, cell.k);
  const auto& d = *config.decision_class;
  switch (d.kind) {
    case DecisionClassSpec::Kind::TopK:
      return DecisionClass::top_k(cell.n, cell.k);
    case DecisionClassSpec::Kind::Explicit:
      return DecisionClass::explicit_sets(cell.n, d.members, d.width_hint);
    case DecisionClassSpec::Kind::UniformMatroid:
      return DecisionClass::matroid(std::make_shared<UniformMatroid>(cell.n, d.rank), d.width_hint);
    case DecisionClassSpec::Kind::PartitionMatroid:
      return DecisionClass::matroid(std::make_shared<PartitionMatroid>(d.blocks, d.capacities), d.width_hint);
  }
  throw std::logic_error("build_decision_class: unknown kind");
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t cell_index, std::uint64_t trial) {
  return derive_seed(derive_seed(master_seed, cell_index), trial);
}

TrialRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t cell_index,
                      const AlgorithmChoice& choice, std::uint64_t trial, RunResult* detail) {
  const auto seed = trial_seed(config.master_seed, cell_index, trial);
  Instance instance = make_instance(cell.family.family, cell.n, cell.k, cell.family.alpha, config.sigma);
  if (config.shuffle_labels && label_symmetric(config, choice)) {
    std::vector<std::size_t> perm(cell.n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto shuffler = make_stream(seed, Stream::Shuffle);
    std::shuffle(perm.begin(), perm.end(), shuffler);
    instance = instance.permuted(perm);
  }

  const auto resolved = resolve_algo_config(config, choice, cell.n);
  SamplingEnv env(std::move(instance), derive_seed(seed, static_cast<std::uint64_t>(Stream::Reward)));
  auto decisions = make_stream(seed, Stream::Decision);

  const auto start = std::chrono::steady_clock::now();
  RunResult result = choice.oracle_driven ? run_general_clucb(build_decision_class(config, cell), resolved.algo, env)
                                          : run(resolved.algo, env, decisions);
  const auto elapsed = std::chrono::steady_clock::now() - start;

  TrialRecord rec;
  rec.algorithm = choice.name();
  rec.family = cell.family_label;
  rec.n = cell.n;
  rec.k = cell.k;
  rec.mode = config.mode;
  rec.trial = trial;
  rec.seed = seed;
  rec.total_samples = result.total_samples;
  rec.correct = result.correct;
  rec.capped = result.capped;
  rec.wall_time_ns =
      config.record_wall_time ? std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count() : 0;
  if (detail) *detail = std::move(result);
  return rec;
}

namespace {

struct Task {
  std::size_t cell;
  std::size_t algorithm;
  std::uint64_t trial;
};

std::vector<Task> plan(const ExperimentConfig& config, std::size_t cells) {
  std::vector<Task> tasks;
  tasks.reserve(cells * config.algorithms.size() * config.trials);
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      for (std::uint64_t t = 0; t < config.trials; ++t) tasks.push_back({c, a, t});
    }
  }
  return tasks;
}

}  // namespace

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto cells = expand_cells(config);
  const auto tasks = plan(config, cells.size());
  std::vector<TrialRecord> records(tasks.size());

  std::exception_ptr failure;
  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      const auto& task = tasks[static_cast<std::size_t>(i)];
      records[static_cast<std::size_t>(i)] =
          run_trial(config, cells[task.cell], task.cell, config.algorithms[task.algorithm], task.trial);
    } catch (...) {
#pragma omp critical(purex_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

std::vector<TrialRecord> run_experiment_serial(const ExperimentConfig& config) {
  validate(config);
  const auto cells = expand_cells(config);
  std::vector<TrialRecord> records;
  for (const auto& task : plan(config, cells.size())) {
    records.push_back(run_trial(config, cells[task.cell], task.cell, config.algorithms[task.algorithm], task.trial));
  }
  return records;
}

std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records) {
  using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, Mode>;
  std::map<Key, std::size_t> index;
  std::vector<std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    const Key key{r.algorithm, r.family, r.n, r.k, r.mode};
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& g : groups) {
    SummaryRow row;
    row.algorithm = g.front()->algorithm;
    row.family = g.front()->family;
    row.n = g.front()->n;
    row.k = g.front()->k;
    row.mode = std::string(mode_name(g.front()->mode));
    row.trials = g.size();
    double sum = 0.0;
    std::uint64_t correct = 0;
    for (const auto* r : g) {
      sum += static_cast<double>(r->total_samples);
      correct += r->correct ? 1 : 0;
      row.capped += r->capped ? 1 : 0;
    }
    const double count = static_cast<double>(g.size());
    row.mean_samples = sum / count;
    if (g.size() > 1) {
      double ss = 0.0;
      for (const auto* r : g) {
        const double d = static_cast<double>(r->total_samples) - row.mean_samples;
        ss += d * d;
      }
      row.stderr_samples = std::sqrt(ss / (count - 1.0)) / std::sqrt(count);
    }
    row.accuracy = static_cast<double>(correct) / count;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace purex
