#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmw/core.hpp"
#include "cmw/metrics.hpp"

namespace cmw::verify {

// Slack RHS - LHS below this counts as a violation.
inline constexpr double kSlackTolerance = -1e-9;

// T rows of N losses.
using LossMatrix = std::vector<std::vector<double>>;

struct ViolationReport {
  std::string check;
  std::uint64_t seed = 0;
  std::string dimensions;
  std::uint64_t instances = 0;    // trajectories or samples examined
  std::uint64_t evaluations = 0;  // individual inequalities evaluated
  std::uint64_t violations = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  std::optional<std::string> first_violation;

  bool ok() const noexcept { return violations == 0; }

  // One checked inequality with the given slack. `describe` is called only
  // for the first violation.
  void record(double slack, const std::function<std::string()>& describe);
  // Folds `other` in; instances and violations add up.
  void merge(const ViolationReport& other);

  std::string to_json() const;
};

/// Fixed-step second-order bound: for every comparator j,
///   sum_t sum_i p_ti (g_ti - g_tj) <= log(N)/eta + eta sum_t sum_i p_ti g_ti^2
/// with p from FixedMW. Requires |g| <= 1.
ViolationReport check_second_order_bound(const LossMatrix& g, double eta);

/// Adaptive second-order bound with p from AdaptiveFTRL and alpha = sqrt(log N):
///   LHS <= 4 log N + (1/(2 log N)) sum_t eta_t H(p_{t+1})
///          + 5 sum_t eta_t sum_i p_ti g_ti^2
/// for every comparator. Requires |g| <= 1.
ViolationReport check_adaptive_regret_inequality(const LossMatrix& g);

struct EntropySample {
  ProbabilityVector p;
  double gap;
  double tau;
  std::size_t best;
};

// 64 log^2(N) / gap^2
double entropy_lemma_tau0(std::size_t n, double gap);

/// H(p)/sqrt(tau) <= (5/8) gap sum_{i != best} p_i + (2/sqrt(tau)) exp(-gap sqrt(tau)/8).
/// Throws PreconditionError for tau below tau0 or gap outside (0,1].
ViolationReport check_entropy_lemma(std::span<const EntropySample> samples);

/// p_{t+1,i} <= 9 p_{t,i} for t >= 4 log N along the AdaptiveFTRL trajectory
/// with alpha = sqrt(log N). Slack is in ratio units: 9 - p_{t+1,i}/p_{t,i}.
ViolationReport check_stability_ratio(const LossMatrix& g);

/// On a fully recorded trace:
///   (c_ti - c_t*)^2 <= (mu_i - mu_*)/gap            for every t, i
///   sum p (l_ti - l_t*) <= sum p (c_ti - c_t*) + 2C  with C the spend total
/// where c is the corrupted and l the clean loss.
ViolationReport check_observations(const TrialTrace& trace);

/// On a fully recorded AdaptiveFTRL trace with alpha = sqrt(log N):
///   sum_t eta_t sum_i p_ti (c_ti - c_t*)^2 <= 16 log N / gap + R_T / 8
///   (1/log N) sum_t eta_t H(p_{t+1})     <= 50 log N / gap + (5/8) R_T
/// with R_T the pseudo regret.
ViolationReport check_sum_bounds(const TrialTrace& trace);

// max_{t,i} |p_ti(FTRL) - p_ti(OMD)|, both built from the generic entropy
// engines under the same schedule.
double max_trajectory_deviation(const LossMatrix& g, const StepSchedule& schedule);

/// Fixed(eta): FTRL and OMD trajectories agree to 1e-12.
ViolationReport check_fixed_equivalence(const LossMatrix& g, double eta);

/// Adaptive schedule: trajectories must differ somewhere; slack is the
/// maximum deviation itself.
ViolationReport check_adaptive_divergence(const LossMatrix& g, const StepSchedule& schedule);

struct SuiteOptions {
  std::uint64_t seed = 20240601;
  unsigned threads = 1;
};

// Every check on its input families; one report per family.
std::vector<ViolationReport> run_suite(const SuiteOptions& options);

}  // namespace cmw::verify
