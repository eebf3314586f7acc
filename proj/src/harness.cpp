#include "cmw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace cmw {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         std::string_view where) {
  for (const auto& [key, value] : object.items()) {
    if (!allowed.contains(key)) {
      throw InvalidInput("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
std::vector<T> scalar_or_list(const json& value) {
  if (value.is_array()) return value.get<std::vector<T>>();
  return {value.get<T>()};
}

AlgorithmSpec parse_algorithm(const json& entry) {
  if (entry.is_string()) return {parse_learner_kind(entry.get<std::string>()), std::nullopt};
  if (!entry.is_object()) throw InvalidInput("algorithm entry must be a string or object");
  reject_unknown_keys(entry, {"kind", "eta", "alpha"}, "algorithm");
  if (!entry.contains("kind")) throw InvalidInput("algorithm entry needs 'kind'");
  AlgorithmSpec spec{parse_learner_kind(entry.at("kind").get<std::string>()), std::nullopt};
  if (entry.contains("eta") && entry.contains("alpha")) {
    throw InvalidInput("algorithm entry takes 'eta' or 'alpha', not both");
  }
  if (entry.contains("eta")) spec.schedule = StepSchedule::fixed(entry.at("eta").get<double>());
  if (entry.contains("alpha")) {
    spec.schedule = StepSchedule::adaptive(entry.at("alpha").get<double>());
  }
  return spec;
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct TrialSummary {
  std::vector<double> pseudo_regret;
  std::vector<double> spent;
};

std::vector<AggregateRow> run_grid(const ExperimentConfig& config, unsigned threads) {
  validate(config);
  check_writable(config.output);
  const auto checkpoints = resolved_checkpoints(config);
  std::vector<AggregateRow> rows;
  for (const auto& algorithm : config.algorithms) {
    for (const auto& scenario : scenarios(config)) {
      std::vector<TrialSummary> results(config.trials);
      parallel_for(config.trials, threads, [&](std::size_t k) {
        const TrialTrace trace = run_trial(config, algorithm, scenario, k);
        TrialSummary s;
        for (auto t : checkpoints) {
          s.pseudo_regret.push_back(trace.pseudo_regret(t));
          s.spent.push_back(trace.corruption_spent(t));
        }
        results[k] = std::move(s);
      });
      const double trials = static_cast<double>(config.trials);
      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        double sum = 0.0, spent = 0.0;
        for (const auto& r : results) {
          sum += r.pseudo_regret[c];
          spent += r.spent[c];
        }
        const double mean = sum / trials;
        double sq = 0.0;
        for (const auto& r : results) sq += (r.pseudo_regret[c] - mean) * (r.pseudo_regret[c] - mean);
        const double stderr_ =
            config.trials > 1 ? std::sqrt(sq / (trials - 1.0)) / std::sqrt(trials) : 0.0;
        rows.push_back({std::string(to_string(algorithm.kind)), config.n, scenario.delta,
                        scenario.budget, checkpoints[c], config.trials, mean, stderr_,
                        spent / trials});
      }
    }
  }
  return rows;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  reject_unknown_keys(doc,
                      {"n", "means", "delta", "lower_bound_instance", "algorithms",
                       "corruption", "budgets", "horizon", "trials", "base_seed",
                       "checkpoints", "output"},
                      "config");
  ExperimentConfig c;
  try {
    if (doc.contains("n")) c.n = doc["n"].get<std::size_t>();
    if (doc.contains("means")) c.means = doc["means"].get<std::vector<double>>();
    if (doc.contains("delta")) c.delta = scalar_or_list<double>(doc["delta"]);
    if (doc.contains("lower_bound_instance")) {
      c.lower_bound_instance = doc["lower_bound_instance"].get<bool>();
    }
    if (doc.contains("algorithms")) {
      for (const auto& a : doc["algorithms"]) c.algorithms.push_back(parse_algorithm(a));
    }
    if (doc.contains("corruption")) {
      const auto name = doc["corruption"].get<std::string>();
      if (name == "none") {
        c.corruption = CorruptionKind::None;
      } else if (name == "front_load") {
        c.corruption = CorruptionKind::FrontLoad;
      } else {
        throw InvalidInput("unknown corruption kind: " + name);
      }
    }
    if (doc.contains("budgets")) c.budgets = scalar_or_list<double>(doc["budgets"]);
    if (doc.contains("horizon")) c.horizon = doc["horizon"].get<std::uint64_t>();
    if (doc.contains("trials")) c.trials = doc["trials"].get<std::uint64_t>();
    if (doc.contains("base_seed")) c.base_seed = doc["base_seed"].get<std::uint64_t>();
    if (doc.contains("checkpoints")) {
      c.checkpoints = doc["checkpoints"].get<std::vector<std::uint64_t>>();
    }
    if (doc.contains("output")) c.output = doc["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config has a field of the wrong type: ") + e.what());
  }
  if (c.algorithms.empty()) {
    c.algorithms = {{LearnerKind::AdaptiveFTRL, std::nullopt},
                    {LearnerKind::AdaptiveOMD, std::nullopt}};
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ExperimentConfig& c) {
  if (c.n < 2) throw InvalidInput("n must be at least 2");
  if (c.means.empty() == c.delta.empty()) {
    throw InvalidInput("give exactly one of 'means' or 'delta'");
  }
  if (!c.means.empty()) {
    if (c.means.size() != c.n) throw InvalidInput("'means' must have n entries");
    StochasticSpec check(c.means);
  } else {
    if (!c.lower_bound_instance) {
      throw InvalidInput("'delta' describes the lower-bound instance; set 'means' otherwise");
    }
    if (c.n != 2) throw InvalidInput("the lower-bound instance has n = 2");
    for (double d : c.delta) {
      if (!(d > 0.0 && d <= 1.0)) throw InvalidInput("delta must lie in (0,1]");
    }
  }
  if (c.algorithms.empty()) throw InvalidInput("no algorithms listed");
  if (c.budgets.empty()) throw InvalidInput("no corruption budgets listed");
  for (double b : c.budgets) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw InvalidInput("budgets must be >= 0");
  }
  if (c.horizon < 1) throw InvalidInput("horizon must be at least 1");
  if (c.trials < 1) throw InvalidInput("trials must be at least 1");
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    if (c.checkpoints[i] < 1 || c.checkpoints[i] > c.horizon) {
      throw InvalidInput("checkpoints must lie in [1, horizon]");
    }
    if (i > 0 && c.checkpoints[i] <= c.checkpoints[i - 1]) {
      throw InvalidInput("checkpoints must be strictly increasing");
    }
  }
}

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t t = 1; t < horizon; t *= 2) out.push_back(t);
  out.push_back(horizon);
  return out;
}

std::vector<std::uint64_t> resolved_checkpoints(const ExperimentConfig& config) {
  return config.checkpoints.empty() ? default_checkpoints(config.horizon)
                                    : config.checkpoints;
}

std::vector<Scenario> scenarios(const ExperimentConfig& config) {
  std::vector<Scenario> out;
  if (!config.means.empty()) {
    StochasticSpec spec(config.means);
    for (double b : config.budgets) out.push_back({spec, spec.gap(), b});
    return out;
  }
  for (double d : config.delta) {
    StochasticSpec spec({0.5 * (1.0 - d), 0.5 * (1.0 + d)});
    for (double b : config.budgets) out.push_back({spec, d, b});
  }
  return out;
}

StepSchedule resolve_schedule(const AlgorithmSpec& algorithm, const Scenario& scenario) {
  if (algorithm.schedule) return *algorithm.schedule;
  if (algorithm.kind == LearnerKind::FixedMW) return StepSchedule::fixed(scenario.delta / 2.0);
  return StepSchedule::default_adaptive(scenario.spec.size());
}

CorruptionStrategy make_corruption(CorruptionKind kind, const Scenario& scenario) {
  if (kind == CorruptionKind::None || scenario.budget == 0.0) return CorruptionStrategy::none();
  return CorruptionStrategy::front_load(scenario.budget, scenario.spec.best_expert());
}

TrialTrace play_protocol(const StochasticSpec& spec, CorruptionStrategy corruption,
                         Learner learner, std::uint64_t horizon, std::uint64_t seed,
                         RecordPolicy policy) {
  if (learner.size() != spec.size()) throw InvalidInput("learner and instance differ in N");
  Rng rng(seed);
  TrialTrace trace({spec.means().begin(), spec.means().end()}, policy);
  History history;
  const bool keep_history = corruption.needs_history();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    LossVector clean = sample_round(spec, rng);
    LossRound round = corruption.apply(t, clean, history);
    ProbabilityVector play = learner.predict();
    const double step = learner.step();
    learner.observe(round.corrupted);
    trace.add_round(play, round, step);
    if (keep_history) {
      history.rounds.push_back(std::move(round));
      history.plays.push_back(std::move(play));
    }
  }
  trace.set_final_play(learner.predict());
  return trace;
}

TrialTrace run_trial(const ExperimentConfig& config, const AlgorithmSpec& algorithm,
                     const Scenario& scenario, std::uint64_t trial_index,
                     RecordPolicy policy) {
  Learner learner(algorithm.kind, resolve_schedule(algorithm, scenario), scenario.spec.size());
  return play_protocol(scenario.spec, make_corruption(config.corruption, scenario),
                       std::move(learner), config.horizon,
                       trial_seed(config.base_seed, trial_index), policy);
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> workers;
    const unsigned used = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned w = 0; w < used; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<AggregateRow> run_experiment(const ExperimentConfig& config, unsigned threads) {
  const std::size_t instances = config.means.empty() ? config.delta.size() : 1;
  if (instances != 1) throw InvalidInput("run takes a single instance; use sweep for a delta grid");
  return run_grid(config, threads);
}

std::vector<AggregateRow> sweep(const ExperimentConfig& config, unsigned threads) {
  return run_grid(config, threads);
}

std::string format_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += r.algorithm + ',' + std::to_string(r.n) + ',' + format_number(r.delta) + ',' +
           format_number(r.budget) + ',' + std::to_string(r.checkpoint) + ',' +
           std::to_string(r.trials) + ',' + format_number(r.mean_pseudo_regret) + ',' +
           format_number(r.stderr_pseudo_regret) + ',' +
           format_number(r.mean_corruption_spent) + '\n';
  }
  return out;
}

void check_writable(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot write to " + path.string());
}

void write_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write to " + path.string());
  out << format_csv(rows);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace cmw
