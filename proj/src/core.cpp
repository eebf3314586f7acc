#include "cmw/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace cmw {

ProbabilityVector::ProbabilityVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 2) {
    throw InvalidInput("probability vector needs at least 2 entries");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw InvalidInput("probability vector entries must be finite and >= 0");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw InvalidInput("probability vector does not sum to 1");
  }
}

ProbabilityVector ProbabilityVector::uniform(std::size_t n) {
  if (n < 2) throw InvalidInput("uniform distribution needs N >= 2");
  return ProbabilityVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProbabilityVector ProbabilityVector::point_mass(std::size_t n, std::size_t index) {
  if (index >= n) throw InvalidInput("point mass index out of range");
  std::vector<double> w(n, 0.0);
  w[index] = 1.0;
  return ProbabilityVector(std::move(w));
}

double ProbabilityVector::dot(std::span<const double> values) const {
  if (values.size() != weights_.size()) {
    throw InvalidInput("dimension mismatch in dot product");
  }
  return std::inner_product(weights_.begin(), weights_.end(), values.begin(), 0.0);
}

LossVector::LossVector(std::vector<double> losses) : losses_(std::move(losses)) {
  for (double l : losses_) {
    if (!(l >= 0.0 && l <= 1.0)) {
      throw InvalidInput("loss entries must lie in [0,1]");
    }
  }
}

StepSchedule StepSchedule::fixed(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw InvalidInput("fixed step size must be positive");
  }
  return {Kind::Fixed, eta};
}

StepSchedule StepSchedule::adaptive(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidInput("adaptive step scale must be positive");
  }
  return {Kind::Adaptive, alpha};
}

StepSchedule StepSchedule::default_adaptive(std::size_t n) {
  if (n < 2) throw InvalidInput("default schedule needs N >= 2");
  return adaptive(std::sqrt(std::log(static_cast<double>(n))));
}

double StepSchedule::at(std::uint64_t t) const {
  if (t == 0) throw InvalidInput("rounds are numbered from 1");
  if (kind_ == Kind::Fixed) return parameter_;
  return parameter_ / std::sqrt(static_cast<double>(t));
}

std::string StepSchedule::describe() const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s(%.17g)",
                kind_ == Kind::Fixed ? "fixed" : "adaptive", parameter_);
  return buf;
}

double step_size(const StepSchedule& schedule, std::uint64_t t) {
  return schedule.at(t);
}

ProbabilityVector normalize_from_logits(std::span<const double> logits) {
  if (logits.size() < 2) throw InvalidInput("need at least 2 logits");
  for (double z : logits) {
    if (!std::isfinite(z)) throw InvalidInput("non-finite logit");
  }
  const double shift = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    w[i] = std::exp(logits[i] - shift);
    total += w[i];
  }
  // total >= 1 since the argmax term is exp(0).
  for (double& x : w) x = std::max(0.0, x / total);
  return ProbabilityVector(std::move(w));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("log_sum_exp of empty range");
  const double shift = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(shift)) throw InvalidInput("non-finite argument");
  double total = 0.0;
  for (double v : values) total += std::exp(v - shift);
  return shift + std::log(total);
}

double entropy(const ProbabilityVector& p) {
  double h = 0.0;
  for (double w : p.weights()) {
    if (w > 0.0) h -= w * std::log(w);
  }
  return std::max(0.0, h);
}

std::vector<double> translate(std::span<const double> loss, double a) {
  std::vector<double> out(loss.begin(), loss.end());
  for (double& x : out) x -= a;
  return out;
}

}  // namespace cmw
