#include "cmw/environments.hpp"

#include <algorithm>
#include <cmath>

namespace cmw {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  return splitmix64(base_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL);
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

StochasticSpec::StochasticSpec(std::vector<double> means) : means_(std::move(means)) {
  if (means_.size() < 2) throw InvalidInput("need at least 2 experts");
  for (double m : means_) {
    if (!(m >= 0.0 && m <= 1.0)) throw InvalidInput("means must lie in [0,1]");
  }
  best_ = static_cast<std::size_t>(
      std::min_element(means_.begin(), means_.end()) - means_.begin());
  gap_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < means_.size(); ++i) {
    if (i != best_) gap_ = std::min(gap_, means_[i] - means_[best_]);
  }
  if (!(gap_ > 0.0)) throw InvalidInput("best expert is not unique");
}

LossVector sample_round(const StochasticSpec& spec, Rng& rng) {
  std::vector<double> losses(spec.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    losses[i] = uniform01(rng) < spec.means()[i] ? 1.0 : 0.0;
  }
  return LossVector(std::move(losses));
}

CorruptionStrategy CorruptionStrategy::none() { return {}; }

CorruptionStrategy CorruptionStrategy::front_load(double budget, std::size_t target) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw InvalidInput("corruption budget must be a finite nonnegative number");
  }
  CorruptionStrategy s;
  s.kind_ = Kind::FrontLoad;
  s.budget_ = budget;
  s.target_ = target;
  return s;
}

CorruptionStrategy CorruptionStrategy::custom(CorruptionRule rule,
                                              std::optional<double> budget) {
  if (!rule) throw InvalidInput("custom corruption needs a rule");
  if (budget && !(*budget >= 0.0)) throw InvalidInput("budget must be nonnegative");
  CorruptionStrategy s;
  s.kind_ = Kind::Custom;
  s.rule_ = std::move(rule);
  s.budget_ = budget.value_or(std::numeric_limits<double>::infinity());
  return s;
}

LossRound CorruptionStrategy::apply(std::uint64_t t, const LossVector& clean,
                                    const History& history) {
  switch (kind_) {
    case Kind::None:
      return {clean, clean, 0.0};

    case Kind::FrontLoad: {
      if (static_cast<double>(t) > budget_) return {clean, clean, 0.0};
      if (target_ >= clean.size()) throw InvalidInput("front-load target out of range");
      std::vector<double> out(clean.size(), 0.0);
      out[target_] = 1.0;
      LossVector corrupted(std::move(out));
      const double spend = linf_distance(corrupted.values(), clean.values());
      spent_ += spend;
      return {clean, std::move(corrupted), spend};
    }

    case Kind::Custom: {
      std::vector<double> out = rule_(AdversaryView{t, clean, history});
      if (out.size() != clean.size()) {
        throw AdversaryFault("adversary returned a loss of the wrong dimension");
      }
      for (double& x : out) {
        if (!std::isfinite(x)) throw AdversaryFault("adversary returned a non-finite loss");
        x = std::clamp(x, 0.0, 1.0);
      }
      double spend = linf_distance(out, clean.values());
      const double remaining = std::max(0.0, budget_ - spent_);
      if (spend > remaining) {
        const double shrink = remaining / spend;
        for (std::size_t i = 0; i < out.size(); ++i) {
          out[i] = std::clamp(clean[i] + shrink * (out[i] - clean[i]), 0.0, 1.0);
        }
        spend = linf_distance(out, clean.values());
      }
      spent_ += spend;
      return {clean, LossVector(std::move(out)), spend};
    }
  }
  return {clean, clean, 0.0};
}

CorruptedInstance lower_bound_instance(double gap, std::uint64_t budget) {
  if (!(gap > 0.0 && gap <= 1.0)) throw InvalidInput("gap must lie in (0,1]");
  if (budget < 1) throw InvalidInput("lower-bound instance needs C >= 1");
  return {StochasticSpec({0.5 * (1.0 - gap), 0.5 * (1.0 + gap)}),
          CorruptionStrategy::front_load(static_cast<double>(budget), 0)};
}

double corruption_total(std::span<const LossRound> rounds) {
  double total = 0.0;
  for (const auto& r : rounds) total += r.round_spend;
  return total;
}

}  // namespace cmw
