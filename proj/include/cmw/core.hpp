#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmw {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class AdversaryFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Absolute tolerance on the sum of a simplex point.
inline constexpr double kSimplexTolerance = 1e-9;

// A point on the probability simplex over N >= 2 experts.
class ProbabilityVector {
 public:
  // Throws InvalidInput unless entries are finite, nonnegative, N >= 2 and
  // the sum is within kSimplexTolerance of 1.
  explicit ProbabilityVector(std::vector<double> weights);

  static ProbabilityVector uniform(std::size_t n);
  static ProbabilityVector point_mass(std::size_t n, std::size_t index);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }

  double dot(std::span<const double> values) const;

  friend bool operator==(const ProbabilityVector&,
                         const ProbabilityVector&) = default;

 private:
  std::vector<double> weights_;
};

// Loss vector with every entry in [0,1]; holds clean and corrupted losses.
class LossVector {
 public:
  explicit LossVector(std::vector<double> losses);

  std::size_t size() const noexcept { return losses_.size(); }
  double operator[](std::size_t i) const noexcept { return losses_[i]; }
  std::span<const double> values() const noexcept { return losses_; }

  friend bool operator==(const LossVector&, const LossVector&) = default;

 private:
  std::vector<double> losses_;
};

// Fixed(eta) or Adaptive(alpha) with eta_t = alpha / sqrt(t).
class StepSchedule {
 public:
  enum class Kind { Fixed, Adaptive };

  static StepSchedule fixed(double eta);
  static StepSchedule adaptive(double alpha);
  // alpha = sqrt(log N), the anytime tuning for N experts.
  static StepSchedule default_adaptive(std::size_t n);

  Kind kind() const noexcept { return kind_; }
  bool is_adaptive() const noexcept { return kind_ == Kind::Adaptive; }
  // eta for Fixed, alpha for Adaptive.
  double parameter() const noexcept { return parameter_; }

  // Step size at round t >= 1.
  double at(std::uint64_t t) const;

  std::string describe() const;

  friend bool operator==(const StepSchedule&, const StepSchedule&) = default;

 private:
  StepSchedule(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_;
  double parameter_;
};

double step_size(const StepSchedule& schedule, std::uint64_t t);

// Max-shifted softmax. Throws InvalidInput for N < 2 or non-finite logits.
ProbabilityVector normalize_from_logits(std::span<const double> logits);

// log(sum_i exp(values[i])), evaluated with the max shift.
double log_sum_exp(std::span<const double> values);

// H(p) = sum_i p_i log(1/p_i), with 0 log(1/0) = 0.
double entropy(const ProbabilityVector& p);

// Componentwise loss[i] - a. The result may leave [0,1].
std::vector<double> translate(std::span<const double> loss, double a);
inline std::vector<double> translate(const LossVector& loss, double a) {
  return translate(loss.values(), a);
}

}  // namespace cmw
