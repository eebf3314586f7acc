#include "cmw/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "cmw/algorithms.hpp"
#include "cmw/environments.hpp"
#include "cmw/harness.hpp"

namespace cmw::verify {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

void require_dimensions(const LossMatrix& g, double bound) {
  if (g.empty()) return;
  const std::size_t n = g.front().size();
  if (n < 2) throw InvalidInput("loss rows need N >= 2");
  for (const auto& row : g) {
    if (row.size() != n) throw InvalidInput("ragged loss matrix");
    for (double x : row) {
      if (!(std::abs(x) <= bound)) throw InvalidInput("loss entry out of range");
    }
  }
}

ViolationReport new_report(std::string check, std::string dimensions,
                           std::uint64_t instances) {
  ViolationReport r;
  r.check = std::move(check);
  r.dimensions = std::move(dimensions);
  r.instances = instances;
  return r;
}

std::size_t width(const LossMatrix& g) { return g.empty() ? 2 : g.front().size(); }

std::string dims(std::size_t n, std::size_t t) {
  return "N=" + std::to_string(n) + ",T=" + std::to_string(t);
}

// Sum over t of g_{t,j}, for every j.
std::vector<double> column_sums(const LossMatrix& g) {
  std::vector<double> sums(width(g), 0.0);
  for (const auto& row : g) {
    for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
  }
  return sums;
}

double weighted_square(const ProbabilityVector& p, std::span<const double> g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += p[i] * g[i] * g[i];
  return s;
}

// Records one inequality per comparator j: slack_j = rhs - (played - column_j).
void record_all_comparators(ViolationReport& report, double played,
                            const std::vector<double>& columns, double rhs) {
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const double lhs = played - columns[j];
    report.record(rhs - lhs, [&] {
      return "comparator " + std::to_string(j) + fmt(": lhs=%.12g rhs=%.12g", lhs, rhs);
    });
  }
}

LossMatrix random_signed(Rng& rng, std::size_t t, std::size_t n) {
  LossMatrix g(t, std::vector<double>(n));
  for (auto& row : g) {
    for (double& x : row) x = 2.0 * uniform01(rng) - 1.0;
  }
  return g;
}

LossMatrix random_bernoulli(Rng& rng, std::size_t t, std::size_t n) {
  std::vector<double> means(n);
  for (double& m : means) m = uniform01(rng);
  LossMatrix g(t, std::vector<double>(n));
  for (auto& row : g) {
    for (std::size_t i = 0; i < n; ++i) row[i] = uniform01(rng) < means[i] ? 1.0 : 0.0;
  }
  return g;
}

LossMatrix alternating(std::size_t t) {
  LossMatrix g(t);
  for (std::size_t s = 0; s < t; ++s) g[s] = s % 2 == 0 ? std::vector{1.0, 0.0} : std::vector{0.0, 1.0};
  return g;
}

// Runs `instance(k, rng)` for k < count in parallel and merges in index order.
ViolationReport run_family(const std::string& name, std::uint64_t seed, std::string digest,
                           std::size_t count, unsigned threads,
                           const std::function<ViolationReport(std::size_t, Rng&)>& instance) {
  std::vector<ViolationReport> parts(count);
  parallel_for(count, threads, [&](std::size_t k) {
    Rng rng(trial_seed(seed, k));
    parts[k] = instance(k, rng);
  });
  ViolationReport total;
  total.check = name;
  total.seed = seed;
  total.dimensions = std::move(digest);
  for (const auto& p : parts) total.merge(p);
  return total;
}

TrialTrace corrupted_trace(LearnerKind kind, const StochasticSpec& spec, double budget,
                           std::uint64_t horizon, std::uint64_t seed) {
  const Scenario scenario{spec, spec.gap(), budget};
  const AlgorithmSpec algorithm{kind, kind == LearnerKind::FixedMW
                                          ? std::optional(StepSchedule::fixed(spec.gap() / 2))
                                          : std::nullopt};
  Learner learner(kind, resolve_schedule(algorithm, scenario), spec.size());
  return play_protocol(spec, make_corruption(CorruptionKind::FrontLoad, scenario),
                       std::move(learner), horizon, seed, RecordPolicy::All);
}

}  // namespace

void ViolationReport::record(double slack, const std::function<std::string()>& describe) {
  ++evaluations;
  worst_slack = std::min(worst_slack, slack);
  if (slack < kSlackTolerance || std::isnan(slack)) {
    if (violations == 0 && !first_violation) first_violation = describe();
    ++violations;
  }
}

void ViolationReport::merge(const ViolationReport& other) {
  instances += other.instances;
  evaluations += other.evaluations;
  if (!first_violation && other.first_violation) first_violation = other.first_violation;
  violations += other.violations;
  worst_slack = std::min(worst_slack, other.worst_slack);
}

std::string ViolationReport::to_json() const {
  nlohmann::ordered_json j;
  j["check"] = check;
  j["seed"] = seed;
  j["dimensions"] = dimensions;
  j["instances"] = instances;
  j["evaluations"] = evaluations;
  j["violations"] = violations;
  if (std::isfinite(worst_slack)) {
    j["worst_slack"] = worst_slack;
  } else {
    j["worst_slack"] = nullptr;
  }
  j["first_violation"] = first_violation ? nlohmann::ordered_json(*first_violation)
                                         : nlohmann::ordered_json(nullptr);
  j["ok"] = ok();
  return j.dump();
}

ViolationReport check_second_order_bound(const LossMatrix& g, double eta) {
  require_dimensions(g, 1.0);
  const std::size_t n = width(g);
  Learner learner(LearnerKind::FixedMW, StepSchedule::fixed(eta), n);
  double played = 0.0, second = 0.0;
  for (const auto& row : g) {
    const ProbabilityVector p = learner.predict();
    played += p.dot(row);
    second += weighted_square(p, row);
    learner.observe_signed(row);
  }
  ViolationReport report = new_report("second_order_bound", dims(n, g.size()), 1);
  const double rhs = std::log(static_cast<double>(n)) / eta + eta * second;
  record_all_comparators(report, played, column_sums(g), rhs);
  return report;
}

ViolationReport check_adaptive_regret_inequality(const LossMatrix& g) {
  require_dimensions(g, 1.0);
  const std::size_t n = width(g);
  const double log_n = std::log(static_cast<double>(n));
  Learner learner(LearnerKind::AdaptiveFTRL, StepSchedule::default_adaptive(n), n);
  double played = 0.0, entropy_term = 0.0, second = 0.0;
  ProbabilityVector p = learner.predict();
  for (const auto& row : g) {
    const double eta = learner.step();
    played += p.dot(row);
    second += eta * weighted_square(p, row);
    learner.observe_signed(row);
    ProbabilityVector next = learner.predict();
    entropy_term += eta * entropy(next);
    p = std::move(next);
  }
  ViolationReport report = new_report("adaptive_regret_inequality", dims(n, g.size()), 1);
  const double rhs = 4.0 * log_n + entropy_term / (2.0 * log_n) + 5.0 * second;
  record_all_comparators(report, played, column_sums(g), rhs);
  return report;
}

double entropy_lemma_tau0(std::size_t n, double gap) {
  const double log_n = std::log(static_cast<double>(n));
  return 64.0 * log_n * log_n / (gap * gap);
}

ViolationReport check_entropy_lemma(std::span<const EntropySample> samples) {
  ViolationReport report = new_report("entropy_lemma", "samples=" + std::to_string(samples.size()), 0);
  for (const auto& s : samples) {
    if (!(s.gap > 0.0 && s.gap <= 1.0)) throw PreconditionError("gap must lie in (0,1]");
    if (s.best >= s.p.size()) throw InvalidInput("best expert index out of range");
    // Allow representation error in tau0 itself.
    if (s.tau < entropy_lemma_tau0(s.p.size(), s.gap) * (1.0 - 1e-12)) {
      throw PreconditionError("tau below 64 log^2(N)/gap^2");
    }
    const double root = std::sqrt(s.tau);
    const double lhs = entropy(s.p) / root;
    const double rhs = 0.625 * s.gap * (1.0 - s.p[s.best]) +
                       2.0 / root * std::exp(-s.gap * root / 8.0);
    ++report.instances;
    report.record(rhs - lhs, [&] {
      return "N=" + std::to_string(s.p.size()) +
             fmt(" gap=%.6g tau=%.6g: lhs=%.12g", s.gap, s.tau, lhs) + fmt(" rhs=%.12g", rhs);
    });
  }
  return report;
}

ViolationReport check_stability_ratio(const LossMatrix& g) {
  require_dimensions(g, 1.0);
  const std::size_t n = width(g);
  for (const auto& row : g) {
    for (double x : row) {
      if (x < 0.0) throw InvalidInput("stability check needs losses in [0,1]");
    }
  }
  const double start = 4.0 * std::log(static_cast<double>(n));
  Learner learner(LearnerKind::AdaptiveFTRL, StepSchedule::default_adaptive(n), n);
  ViolationReport report = new_report("stability_ratio", dims(n, g.size()), 1);
  ProbabilityVector p = learner.predict();
  for (const auto& row : g) {
    const std::uint64_t t = learner.round();
    learner.observe_signed(row);
    ProbabilityVector next = learner.predict();
    if (static_cast<double>(t) >= start) {
      for (std::size_t i = 0; i < n; ++i) {
        if (p[i] == 0.0 && next[i] == 0.0) continue;
        const double slack = p[i] > 0.0 ? 9.0 - next[i] / p[i] : -1.0;
        report.record(slack, [&] {
          return "t=" + std::to_string(t) + " i=" + std::to_string(i) +
                 fmt(": p_t=%.12g p_t+1=%.12g", p[i], next[i]);
        });
      }
    }
    p = std::move(next);
  }
  return report;
}

ViolationReport check_observations(const TrialTrace& trace) {
  const auto records = trace.records();
  if (trace.policy() != RecordPolicy::All || records.size() != trace.rounds()) {
    throw InvalidInput("observation check needs every round recorded");
  }
  const auto mu = trace.means();
  const std::size_t best = trace.best_expert();
  const std::size_t n = mu.size();
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i != best) gap = std::min(gap, mu[i] - mu[best]);
  }
  ViolationReport report = new_report("observations", dims(n, records.size()), 1);
  double clean_relative = 0.0, corrupted_relative = 0.0, spend = 0.0;
  for (const auto& r : records) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = r.corrupted[i] - r.corrupted[best];
      const double rhs = (mu[i] - mu[best]) / gap;
      report.record(rhs - d * d, [&] {
        return "squared corrupted gap at t=" + std::to_string(r.t) + " i=" + std::to_string(i) +
               fmt(": %.12g > %.12g", d * d, rhs);
      });
      clean_relative += r.play[i] * (r.clean[i] - r.clean[best]);
      corrupted_relative += r.play[i] * (r.corrupted[i] - r.corrupted[best]);
    }
    double round_spend = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      round_spend = std::max(round_spend, std::abs(r.corrupted[i] - r.clean[i]));
    }
    spend += round_spend;
  }
  const double rhs = corrupted_relative + 2.0 * spend;
  report.record(rhs - clean_relative, [&] {
    return fmt("clean relative loss %.12g > corrupted %.12g + 2C (C=%.12g)", clean_relative,
               corrupted_relative, spend);
  });
  return report;
}

ViolationReport check_sum_bounds(const TrialTrace& trace) {
  const auto records = trace.records();
  if (trace.policy() != RecordPolicy::All || records.size() != trace.rounds() || !trace.final_play()) {
    throw InvalidInput("sum bounds need every round recorded and the final play");
  }
  const auto mu = trace.means();
  const std::size_t best = trace.best_expert();
  const std::size_t n = mu.size();
  const double log_n = std::log(static_cast<double>(n));
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (i != best) gap = std::min(gap, mu[i] - mu[best]);
  }
  double second = 0.0, entropy_sum = 0.0;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    double inner = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = r.corrupted[i] - r.corrupted[best];
      inner += r.play[i] * d * d;
    }
    second += r.step * inner;
    const ProbabilityVector& next =
        k + 1 < records.size() ? records[k + 1].play : *trace.final_play();
    entropy_sum += r.step * entropy(next);
  }
  const double pseudo = trace.pseudo_regret(trace.rounds());
  ViolationReport report = new_report("sum_bounds", dims(n, records.size()), 1);
  const double rhs_second = 16.0 * log_n / gap + pseudo / 8.0;
  report.record(rhs_second - second, [&] {
    return fmt("second-moment sum %.12g > %.12g", second, rhs_second);
  });
  const double lhs_entropy = entropy_sum / log_n;
  const double rhs_entropy = 50.0 * log_n / gap + 0.625 * pseudo;
  report.record(rhs_entropy - lhs_entropy, [&] {
    return fmt("entropy sum %.12g > %.12g", lhs_entropy, rhs_entropy);
  });
  return report;
}

double max_trajectory_deviation(const LossMatrix& g, const StepSchedule& schedule) {
  require_dimensions(g, std::numeric_limits<double>::max());
  const std::size_t n = width(g);
  std::vector<double> cumulative(n, 0.0);
  ProbabilityVector omd = ProbabilityVector::uniform(n);
  double worst = 0.0;
  for (std::size_t s = 0; s <= g.size(); ++s) {
    const std::uint64_t t = s + 1;
    const ProbabilityVector ftrl = generic_ftrl_entropy(cumulative, schedule.at(t));
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(ftrl[i] - omd[i]));
    if (s == g.size()) break;
    omd = generic_omd_entropy_step(omd, g[s], schedule.at(t));
    for (std::size_t i = 0; i < n; ++i) cumulative[i] += g[s][i];
  }
  return worst;
}

ViolationReport check_fixed_equivalence(const LossMatrix& g, double eta) {
  ViolationReport report = new_report("fixed_equivalence", dims(width(g), g.size()), 1);
  const double deviation = max_trajectory_deviation(g, StepSchedule::fixed(eta));
  // The inequality here is deviation <= 1e-12; shift so the shared
  // tolerance does not loosen it.
  const double slack = 1e-12 - deviation;
  report.record(slack < 0.0 ? std::min(slack, 2.0 * kSlackTolerance) : slack, [&] {
    return fmt("eta=%.6g: max deviation %.3e", eta, deviation);
  });
  return report;
}

ViolationReport check_adaptive_divergence(const LossMatrix& g, const StepSchedule& schedule) {
  ViolationReport report = new_report("adaptive_divergence", dims(width(g), g.size()), 1);
  const double deviation = max_trajectory_deviation(g, schedule);
  report.record(deviation > 0.0 ? deviation : 2.0 * kSlackTolerance, [&] {
    return std::string("adaptive FTRL and OMD trajectories coincide");
  });
  return report;
}

std::vector<ViolationReport> run_suite(const SuiteOptions& options) {
  const unsigned threads = options.threads;
  std::uint64_t family = 0;
  auto next_seed = [&] { return trial_seed(options.seed, family++); };
  std::vector<ViolationReport> out;

  out.push_back(run_family("second_order_bound/random_signed", next_seed(),
                           "N=8,T=500,eta=0.1,instances=1000", 1000, threads,
                           [](std::size_t, Rng& rng) {
                             return check_second_order_bound(random_signed(rng, 500, 8), 0.1);
                           }));
  out.push_back(run_family("second_order_bound/zero_losses", next_seed(), "N in {2,5,8},T=100",
                           3, threads, [](std::size_t k, Rng&) {
                             const std::size_t n = k == 0 ? 2 : (k == 1 ? 5 : 8);
                             return check_second_order_bound(
                                 LossMatrix(100, std::vector<double>(n, 0.0)), 0.3);
                           }));
  out.push_back(run_family("second_order_bound/alternating", next_seed(), "N=2,T=10000,eta=0.5",
                           1, threads, [](std::size_t, Rng&) {
                             return check_second_order_bound(alternating(10000), 0.5);
                           }));

  const std::size_t widths[] = {2, 8, 32};
  for (std::size_t n : widths) {
    out.push_back(run_family("adaptive_regret_inequality/bernoulli_N" + std::to_string(n),
                             next_seed(), "N=" + std::to_string(n) + ",T=2000,instances=1000",
                             1000, threads, [n](std::size_t, Rng& rng) {
                               return check_adaptive_regret_inequality(
                                   random_bernoulli(rng, 2000, n));
                             }));
  }
  out.push_back(run_family("adaptive_regret_inequality/random_signed", next_seed(),
                           "N=8,T=2000,instances=1000", 1000, threads,
                           [](std::size_t, Rng& rng) {
                             return check_adaptive_regret_inequality(random_signed(rng, 2000, 8));
                           }));

  out.push_back(run_family(
      "entropy_lemma/simplex_uniform", next_seed(),
      "N in [2,64],gap in [0.01,1],tau in [tau0,100 tau0],samples=100000", 100, threads,
      [](std::size_t, Rng& rng) {
        std::vector<EntropySample> samples;
        samples.reserve(1000);
        for (int k = 0; k < 1000; ++k) {
          const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 63.0);
          std::vector<double> w(n);
          double total = 0.0;
          for (double& x : w) {
            x = -std::log1p(-uniform01(rng));
            total += x;
          }
          for (double& x : w) x /= total;
          const double gap = 0.01 + 0.99 * uniform01(rng);
          const double tau0 = entropy_lemma_tau0(n, gap);
          const double tau = tau0 * std::pow(100.0, uniform01(rng));
          const auto best = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
          samples.push_back({ProbabilityVector(std::move(w)), gap, tau, best});
        }
        auto report = check_entropy_lemma(samples);
        return report;
      }));

  out.push_back(run_family("stability_ratio/bernoulli_N16", next_seed(),
                           "N=16,T=10000,instances=1000", 1000, threads,
                           [](std::size_t, Rng& rng) {
                             return check_stability_ratio(random_bernoulli(rng, 10000, 16));
                           }));
  out.push_back(run_family("stability_ratio/alternating", next_seed(), "N=2,T=10000", 1, threads,
                           [](std::size_t, Rng&) { return check_stability_ratio(alternating(10000)); }));
  out.push_back(run_family("stability_ratio/constant", next_seed(), "N=4,T=1000", 1, threads,
                           [](std::size_t, Rng&) {
                             return check_stability_ratio(
                                 LossMatrix(1000, std::vector<double>{0.0, 0.25, 0.5, 1.0}));
                           }));

  const LearnerKind kinds[] = {LearnerKind::FixedMW, LearnerKind::AdaptiveFTRL,
                               LearnerKind::AdaptiveOMD};
  out.push_back(run_family("observations/front_load_C50", next_seed(),
                           "N=2,gap=0.4,C=50,T=5000,instances=1000", 1000, threads,
                           [&kinds](std::size_t k, Rng& rng) {
                             const auto inst = lower_bound_instance(0.4, 50);
                             return check_observations(
                                 corrupted_trace(kinds[k % 3], inst.spec, 50.0, 5000, rng()));
                           }));
  out.push_back(run_family("observations/uncorrupted_random_means", next_seed(),
                           "N in [2,8],C=0,T=2000,instances=1000", 1000, threads,
                           [&kinds](std::size_t k, Rng& rng) {
                             const std::size_t n = 2 + k % 7;
                             std::vector<double> means(n);
                             for (double& m : means) m = uniform01(rng);
                             return check_observations(corrupted_trace(
                                 kinds[k % 3], StochasticSpec(means), 0.0, 2000, rng()));
                           }));

  out.push_back(run_family("sum_bounds/gap0.4_C0", next_seed(), "N=2,gap=0.4,C=0,T=10000,instances=500",
                           500, threads, [](std::size_t, Rng& rng) {
                             const auto inst = lower_bound_instance(0.4, 1);
                             return check_sum_bounds(corrupted_trace(
                                 LearnerKind::AdaptiveFTRL, inst.spec, 0.0, 10000, rng()));
                           }));
  out.push_back(run_family("sum_bounds/gap0.4_C100", next_seed(),
                           "N=2,gap=0.4,C=100,T=10000,instances=500", 500, threads,
                           [](std::size_t, Rng& rng) {
                             const auto inst = lower_bound_instance(0.4, 100);
                             return check_sum_bounds(corrupted_trace(
                                 LearnerKind::AdaptiveFTRL, inst.spec, 100.0, 10000, rng()));
                           }));
  out.push_back(run_family("sum_bounds/deterministic_gap1", next_seed(), "N=2,gap=1,C=0,T=10000",
                           1, threads, [](std::size_t, Rng& rng) {
                             return check_sum_bounds(corrupted_trace(
                                 LearnerKind::AdaptiveFTRL, StochasticSpec({0.0, 1.0}), 0.0,
                                 10000, rng()));
                           }));

  out.push_back(run_family("fixed_equivalence/random", next_seed(),
                           "N in [2,8],T in [1,1000],eta in (0,1],instances=100", 100, threads,
                           [](std::size_t, Rng& rng) {
                             const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 7);
                             const std::size_t t = 1 + static_cast<std::size_t>(uniform01(rng) * 1000);
                             const double eta = 1.0 - uniform01(rng);
                             return check_fixed_equivalence(random_signed(rng, t, n), eta);
                           }));
  out.push_back(run_family("adaptive_divergence/lower_bound_instance", next_seed(),
                           "N=2,gap=0.1,C=200,T=70", 1, threads, [](std::size_t, Rng& rng) {
                             auto inst = lower_bound_instance(0.1, 200);
                             Learner learner(LearnerKind::AdaptiveOMD,
                                             StepSchedule::default_adaptive(2), 2);
                             const auto trace = play_protocol(inst.spec, inst.corruption, learner,
                                                              70, rng(), RecordPolicy::All);
                             LossMatrix g;
                             for (const auto& r : trace.records()) {
                               g.emplace_back(r.corrupted.values().begin(),
                                              r.corrupted.values().end());
                             }
                             return check_adaptive_divergence(g, StepSchedule::default_adaptive(2));
                           }));
  return out;
}

}  // namespace cmw::verify
