#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmw/algorithms.hpp"
#include "cmw/core.hpp"
#include "cmw/environments.hpp"
#include "cmw/metrics.hpp"

namespace cmw {

struct AlgorithmSpec {
  LearnerKind kind = LearnerKind::AdaptiveFTRL;
  // Unset: sqrt(log N)/sqrt(t) for the adaptive kinds, gap/2 for fixed_mw.
  std::optional<StepSchedule> schedule;
};

enum class CorruptionKind { None, FrontLoad };

/// Experiment description. JSON keys are the field names below; unknown keys
/// are rejected.
///
/// The instance is either explicit `means` or one or more gaps in `delta`,
/// each turned into the two-expert instance mu = ((1-d)/2, (1+d)/2).
struct ExperimentConfig {
  std::size_t n = 2;
  std::vector<double> means;
  std::vector<double> delta;
  bool lower_bound_instance = true;
  std::vector<AlgorithmSpec> algorithms;
  CorruptionKind corruption = CorruptionKind::FrontLoad;
  std::vector<double> budgets{0.0};
  std::uint64_t horizon = 100000;
  std::uint64_t trials = 100;
  std::uint64_t base_seed = 0;
  // Empty: powers of two below the horizon, then the horizon.
  std::vector<std::uint64_t> checkpoints;
  std::string output = "results.csv";
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Throws InvalidInput when an invariant of the config is violated.
void validate(const ExperimentConfig& config);

std::vector<std::uint64_t> default_checkpoints(std::uint64_t horizon);
std::vector<std::uint64_t> resolved_checkpoints(const ExperimentConfig& config);

// One (instance, C) cell of the experiment grid.
struct Scenario {
  StochasticSpec spec;
  double delta;
  double budget;
};

std::vector<Scenario> scenarios(const ExperimentConfig& config);

StepSchedule resolve_schedule(const AlgorithmSpec& algorithm, const Scenario& scenario);
CorruptionStrategy make_corruption(CorruptionKind kind, const Scenario& scenario);

// Runs the corrupted protocol for `horizon` rounds: sample, corrupt, predict,
// observe. The learner only sees the corrupted loss.
TrialTrace play_protocol(const StochasticSpec& spec, CorruptionStrategy corruption,
                         Learner learner, std::uint64_t horizon, std::uint64_t seed,
                         RecordPolicy policy = RecordPolicy::None);

// Deterministic in (base_seed, trial_index); the clean-loss stream depends on
// those two alone, so every algorithm and budget sees the same losses.
TrialTrace run_trial(const ExperimentConfig& config, const AlgorithmSpec& algorithm,
                     const Scenario& scenario, std::uint64_t trial_index,
                     RecordPolicy policy = RecordPolicy::None);

struct AggregateRow {
  std::string algorithm;
  std::size_t n;
  double delta;
  double budget;
  std::uint64_t checkpoint;
  std::uint64_t trials;
  double mean_pseudo_regret;
  double stderr_pseudo_regret;
  double mean_corruption_spent;
};

inline constexpr std::string_view kCsvHeader =
    "algorithm,N,delta,C,T_checkpoint,trials,mean_pseudo_regret,"
    "stderr_pseudo_regret,mean_corruption_spent";

// Runs fn(0..count-1) on up to `threads` workers. Each index runs exactly once.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

// Aggregates over trials for every (algorithm, scenario, checkpoint), in
// config order. Trial results are reduced in index order, so the output does
// not depend on `threads`.
std::vector<AggregateRow> run_experiment(const ExperimentConfig& config,
                                         unsigned threads = 1);

// Same grid as run_experiment; kept as the entry point for delta x C grids.
std::vector<AggregateRow> sweep(const ExperimentConfig& config, unsigned threads = 1);

std::string format_csv(const std::vector<AggregateRow>& rows);
void write_csv(const std::vector<AggregateRow>& rows, const std::filesystem::path& path);

// Fails with IoError if the path cannot be opened for writing.
void check_writable(const std::filesystem::path& path);

}  // namespace cmw
