#include "cmw/metrics.hpp"

#include <algorithm>
#include <bit>

namespace cmw {

namespace {

std::size_t unique_argmin(std::span<const double> means) {
  if (means.empty()) throw InvalidInput("empty mean vector");
  const auto it = std::min_element(means.begin(), means.end());
  if (std::count(means.begin(), means.end(), *it) != 1) {
    throw InvalidInput("best expert is not unique");
  }
  return static_cast<std::size_t>(it - means.begin());
}

}  // namespace

double pseudo_regret_increment(const ProbabilityVector& p, std::span<const double> means) {
  if (p.size() != means.size()) throw InvalidInput("dimension mismatch");
  const double best = means[unique_argmin(means)];
  double r = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) r += p[i] * (means[i] - best);
  return r;
}

double realized_regret(std::span<const ProbabilityVector> plays,
                       std::span<const LossVector> losses) {
  if (plays.size() != losses.size()) throw InvalidInput("plays and losses differ in length");
  if (plays.empty()) return 0.0;
  const std::size_t n = plays.front().size();
  std::vector<double> expert(n, 0.0);
  double learner = 0.0;
  for (std::size_t t = 0; t < plays.size(); ++t) {
    if (plays[t].size() != n || losses[t].size() != n) throw InvalidInput("dimension mismatch");
    learner += plays[t].dot(losses[t].values());
    for (std::size_t i = 0; i < n; ++i) expert[i] += losses[t][i];
  }
  return learner - *std::min_element(expert.begin(), expert.end());
}

TrialTrace::TrialTrace(std::vector<double> means, RecordPolicy policy)
    : means_(std::move(means)), policy_(policy), expert_loss_(means_.size(), 0.0) {
  best_ = unique_argmin(means_);
}

bool TrialTrace::keep(std::uint64_t t) const {
  switch (policy_) {
    case RecordPolicy::None: return false;
    case RecordPolicy::All: return true;
    case RecordPolicy::LogGrid: return t <= 16 || std::has_single_bit(t);
  }
  return false;
}

void TrialTrace::add_round(const ProbabilityVector& play, const LossRound& round,
                           double step) {
  const std::uint64_t t = rounds() + 1;
  const double prev_pseudo = pseudo_regret_.empty() ? 0.0 : pseudo_regret_.back();
  const double prev_spent = corruption_spent_.empty() ? 0.0 : corruption_spent_.back();
  pseudo_regret_.push_back(prev_pseudo + pseudo_regret_increment(play, means_));
  corruption_spent_.push_back(prev_spent + round.round_spend);

  learner_loss_ += play.dot(round.clean.values());
  for (std::size_t i = 0; i < expert_loss_.size(); ++i) expert_loss_[i] += round.clean[i];
  realized_regret_.push_back(learner_loss_ -
                             *std::min_element(expert_loss_.begin(), expert_loss_.end()));

  if (keep(t)) records_.push_back({t, play, round.clean, round.corrupted, step});
}

double TrialTrace::pseudo_regret(std::uint64_t t) const {
  if (t > rounds()) throw InvalidInput("round beyond trace length");
  return t == 0 ? 0.0 : pseudo_regret_[t - 1];
}

double TrialTrace::realized_regret(std::uint64_t t) const {
  if (t > rounds()) throw InvalidInput("round beyond trace length");
  return t == 0 ? 0.0 : realized_regret_[t - 1];
}

double TrialTrace::corruption_spent(std::uint64_t t) const {
  if (t > rounds()) throw InvalidInput("round beyond trace length");
  return t == 0 ? 0.0 : corruption_spent_[t - 1];
}

bool operator==(const TrialTrace& a, const TrialTrace& b) {
  auto same_record = [](const RoundRecord& x, const RoundRecord& y) {
    return x.t == y.t && x.play == y.play && x.clean == y.clean &&
           x.corrupted == y.corrupted && x.step == y.step;
  };
  return a.means_ == b.means_ && a.policy_ == b.policy_ &&
         a.pseudo_regret_ == b.pseudo_regret_ &&
         a.realized_regret_ == b.realized_regret_ &&
         a.corruption_spent_ == b.corruption_spent_ &&
         std::equal(a.records_.begin(), a.records_.end(), b.records_.begin(),
                    b.records_.end(), same_record) &&
         a.final_play_ == b.final_play_;
}

}  // namespace cmw
