#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmw/core.hpp"

namespace cmw {

enum class LearnerKind { FixedMW, AdaptiveFTRL, AdaptiveOMD };

std::string_view to_string(LearnerKind kind);
// Accepts "fixed_mw", "adaptive_ftrl", "adaptive_omd".
LearnerKind parse_learner_kind(std::string_view name);

/// Multiplicative-weights learner over N experts.
///
/// FixedMW and AdaptiveFTRL keep the raw cumulative loss G and play
/// softmax(-eta_t * G); AdaptiveOMD keeps W = sum_s eta_s g_s and plays
/// softmax(-W). With a Fixed schedule all three coincide.
///
/// A Learner is a plain value: copy it to checkpoint a run.
class Learner {
 public:
  // FixedMW requires a Fixed schedule.
  Learner(LearnerKind kind, StepSchedule schedule, std::size_t n);

  LearnerKind kind() const noexcept { return kind_; }
  const StepSchedule& schedule() const noexcept { return schedule_; }
  std::size_t size() const noexcept { return statistic_.size(); }

  // Current round t; equals 1 + number of observe calls.
  std::uint64_t round() const noexcept { return round_; }

  // eta_t at the current round.
  double step() const { return schedule_.at(round_); }

  // G for FixedMW/AdaptiveFTRL, W for AdaptiveOMD.
  std::span<const double> statistic() const noexcept { return statistic_; }

  ProbabilityVector predict() const;

  void observe(const LossVector& g) { observe_signed(g.values()); }

  // Same update for arbitrary real losses (translated or signed sequences
  // used by the inequality checks).
  void observe_signed(std::span<const double> g);

 private:
  LearnerKind kind_;
  StepSchedule schedule_;
  std::uint64_t round_ = 1;
  std::vector<double> statistic_;
};

// Minimizer of w.G + (1/eta) sum_i w_i log w_i over the simplex, i.e. the
// Gibbs distribution w_i = exp(-eta G_i - log Z).
ProbabilityVector generic_ftrl_entropy(std::span<const double> cumulative, double eta);

// One OMD step with the entropy mirror map: w'_i = p_i exp(-eta g_i), then
// KL projection onto the simplex (renormalization). p must be strictly
// positive.
ProbabilityVector generic_omd_entropy_step(const ProbabilityVector& p,
                                           std::span<const double> g, double eta);

}  // namespace cmw
