#include "cmw/algorithms.hpp"

#include <cmath>

namespace cmw {

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::FixedMW: return "fixed_mw";
    case LearnerKind::AdaptiveFTRL: return "adaptive_ftrl";
    case LearnerKind::AdaptiveOMD: return "adaptive_omd";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(std::string_view name) {
  if (name == "fixed_mw") return LearnerKind::FixedMW;
  if (name == "adaptive_ftrl") return LearnerKind::AdaptiveFTRL;
  if (name == "adaptive_omd") return LearnerKind::AdaptiveOMD;
  throw InvalidInput("unknown algorithm kind: " + std::string(name));
}

Learner::Learner(LearnerKind kind, StepSchedule schedule, std::size_t n)
    : kind_(kind), schedule_(schedule), statistic_(n, 0.0) {
  if (n < 2) throw InvalidInput("learner needs N >= 2 experts");
  if (kind == LearnerKind::FixedMW && schedule.is_adaptive()) {
    throw InvalidInput("fixed_mw requires a fixed step schedule");
  }
}

ProbabilityVector Learner::predict() const {
  std::vector<double> logits(statistic_.size());
  const double scale = kind_ == LearnerKind::AdaptiveOMD ? 1.0 : step();
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = -scale * statistic_[i];
  return normalize_from_logits(logits);
}

void Learner::observe_signed(std::span<const double> g) {
  if (g.size() != statistic_.size()) {
    throw InvalidInput("loss dimension does not match learner");
  }
  for (double x : g) {
    if (!std::isfinite(x)) throw InvalidInput("non-finite loss");
  }
  // OMD weights the loss of round t by eta_t, evaluated before the increment.
  const double weight = kind_ == LearnerKind::AdaptiveOMD ? step() : 1.0;
  for (std::size_t i = 0; i < g.size(); ++i) statistic_[i] += weight * g[i];
  ++round_;
}

ProbabilityVector generic_ftrl_entropy(std::span<const double> cumulative, double eta) {
  if (!(eta > 0.0)) throw InvalidInput("regularization step must be positive");
  std::vector<double> scaled(cumulative.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = -eta * cumulative[i];
  const double log_partition = log_sum_exp(scaled);
  for (double& s : scaled) s = std::exp(s - log_partition);
  // Absorb the last-ulp drift of the exp/log route.
  double total = 0.0;
  for (double s : scaled) total += s;
  for (double& s : scaled) s /= total;
  return ProbabilityVector(std::move(scaled));
}

ProbabilityVector generic_omd_entropy_step(const ProbabilityVector& p,
                                           std::span<const double> g, double eta) {
  if (g.size() != p.size()) throw InvalidInput("loss dimension does not match play");
  if (!(eta > 0.0)) throw InvalidInput("mirror step must be positive");
  std::vector<double> w(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(p[i] > 0.0)) {
      throw InvalidInput("entropy mirror step needs a strictly positive point");
    }
    w[i] = p[i] * std::exp(-eta * g[i]);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return ProbabilityVector(std::move(w));
}

}  // namespace cmw
