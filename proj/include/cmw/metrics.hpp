#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmw/core.hpp"
#include "cmw/environments.hpp"

namespace cmw {

// sum_i p_i (mu_i - mu_{i*}). Throws InvalidInput if the argmin of mu is
// not unique.
double pseudo_regret_increment(const ProbabilityVector& p, std::span<const double> means);

// sum_t p_t . l_t - min_i sum_t l_{t,i} on clean losses.
double realized_regret(std::span<const ProbabilityVector> plays,
                       std::span<const LossVector> losses);

struct RoundRecord {
  std::uint64_t t;
  ProbabilityVector play;
  LossVector clean;
  LossVector corrupted;
  double step;
};

enum class RecordPolicy {
  None,     // cumulative series only
  All,      // every round
  LogGrid,  // t <= 16 and powers of two
};

/// Outcome of one trial. Cumulative series are exact at every round;
/// per-round records follow the RecordPolicy.
class TrialTrace {
 public:
  TrialTrace(std::vector<double> means, RecordPolicy policy);

  void add_round(const ProbabilityVector& play, const LossRound& round, double step);
  // p_{T+1}, the play after the final observation.
  void set_final_play(ProbabilityVector play) { final_play_ = std::move(play); }

  std::uint64_t rounds() const noexcept { return pseudo_regret_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  std::size_t best_expert() const noexcept { return best_; }
  RecordPolicy policy() const noexcept { return policy_; }

  // Cumulative values after round t (1-based); t = 0 gives 0.
  double pseudo_regret(std::uint64_t t) const;
  double realized_regret(std::uint64_t t) const;
  double corruption_spent(std::uint64_t t) const;

  std::span<const double> pseudo_regret_series() const noexcept { return pseudo_regret_; }
  std::span<const RoundRecord> records() const noexcept { return records_; }
  const std::optional<ProbabilityVector>& final_play() const noexcept { return final_play_; }

  friend bool operator==(const TrialTrace& a, const TrialTrace& b);

 private:
  bool keep(std::uint64_t t) const;

  std::vector<double> means_;
  std::size_t best_ = 0;
  RecordPolicy policy_;
  std::vector<double> pseudo_regret_;
  std::vector<double> realized_regret_;
  std::vector<double> corruption_spent_;
  std::vector<RoundRecord> records_;
  std::optional<ProbabilityVector> final_play_;
  double learner_loss_ = 0.0;
  std::vector<double> expert_loss_;
};

}  // namespace cmw
