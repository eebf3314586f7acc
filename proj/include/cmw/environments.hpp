#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "cmw/core.hpp"

namespace cmw {

using Rng = std::mt19937_64;

// Per-trial seed: splitmix64 finalizer applied to
// base_seed + (trial_index + 1) * 0x9E3779B97F4A7C15.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index);

// Uniform double in [0,1) from the top 53 bits of one generator draw.
double uniform01(Rng& rng);

// Independent Bernoulli(mu_i) losses with a unique best expert.
class StochasticSpec {
 public:
  // Throws InvalidInput if a mean leaves [0,1], N < 2, or the argmin is not
  // strict.
  explicit StochasticSpec(std::vector<double> means);

  std::size_t size() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  std::size_t best_expert() const noexcept { return best_; }
  // min over i != i* of mu_i - mu_{i*}
  double gap() const noexcept { return gap_; }

 private:
  std::vector<double> means_;
  std::size_t best_ = 0;
  double gap_ = 0.0;
};

LossVector sample_round(const StochasticSpec& spec, Rng& rng);

struct LossRound {
  LossVector clean;
  LossVector corrupted;
  double round_spend = 0.0;  // ||corrupted - clean||_inf
};

// Everything an adaptive adversary may look at before emitting round t.
struct History {
  std::vector<LossRound> rounds;          // rounds 1..t-1
  std::vector<ProbabilityVector> plays;   // learner plays p_1..p_{t-1}
};

struct AdversaryView {
  std::uint64_t round;
  const LossVector& clean;
  const History& history;
};

using CorruptionRule = std::function<std::vector<double>(const AdversaryView&)>;

class CorruptionStrategy {
 public:
  enum class Kind { None, FrontLoad, Custom };

  static CorruptionStrategy none();
  // Rounds t <= floor(budget): target expert's loss set to 1, all others to 0.
  static CorruptionStrategy front_load(double budget, std::size_t target);
  // Rule output is clamped to [0,1]; with a budget, any round that would
  // overspend is pulled back toward the clean loss to land exactly on it.
  static CorruptionStrategy custom(CorruptionRule rule,
                                   std::optional<double> budget = std::nullopt);

  Kind kind() const noexcept { return kind_; }
  double budget() const noexcept { return budget_; }
  double spent() const noexcept { return spent_; }
  std::size_t target() const noexcept { return target_; }
  bool needs_history() const noexcept { return kind_ == Kind::Custom; }

  LossRound apply(std::uint64_t t, const LossVector& clean, const History& history);

 private:
  CorruptionStrategy() = default;

  Kind kind_ = Kind::None;
  double budget_ = 0.0;
  double spent_ = 0.0;
  std::size_t target_ = 0;
  CorruptionRule rule_;
};

inline LossRound apply_corruption(CorruptionStrategy& strategy, std::uint64_t t,
                                  const LossVector& clean, const History& history) {
  return strategy.apply(t, clean, history);
}

struct CorruptedInstance {
  StochasticSpec spec;
  CorruptionStrategy corruption;
};

// Two experts with mu = ((1-gap)/2, (1+gap)/2); the first C rounds show
// expert 1 a loss of 1 and expert 2 a loss of 0.
CorruptedInstance lower_bound_instance(double gap, std::uint64_t budget);

double corruption_total(std::span<const LossRound> rounds);

}  // namespace cmw
