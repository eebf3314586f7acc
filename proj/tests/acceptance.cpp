// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmw/harness.hpp"
#include "cmw/verify.hpp"

#ifndef MWSIM_PATH
#define MWSIM_PATH "mwsim"
#endif

using namespace cmw;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr std::uint64_t kTrials = 100;

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

const AggregateRow& find_row(const std::vector<AggregateRow>& rows, LearnerKind kind, double delta,
                             double budget, std::uint64_t t) {
  for (const auto& r : rows) {
    if (r.algorithm == to_string(kind) && r.delta == delta && r.budget == budget && r.checkpoint == t) {
      return r;
    }
  }
  throw std::runtime_error("missing aggregate row");
}

ExperimentConfig base_config(std::vector<double> delta, std::vector<double> budgets,
                             std::vector<AlgorithmSpec> algorithms, std::uint64_t horizon,
                             std::vector<std::uint64_t> checkpoints) {
  ExperimentConfig c;
  c.delta = std::move(delta);
  c.budgets = std::move(budgets);
  c.algorithms = std::move(algorithms);
  c.horizon = horizon;
  c.trials = kTrials;
  c.base_seed = kSeed;
  c.checkpoints = std::move(checkpoints);
  c.output = (std::filesystem::temp_directory_path() / "cmw_acceptance_scratch.csv").string();
  return c;
}

const double kLog2 = std::log(2.0);
const double kAlpha = std::sqrt(kLog2);

Outcome fixed_step_bound() {
  Outcome o;
  const auto c = base_config({0.4}, {0.0, 50.0}, {{LearnerKind::FixedMW, StepSchedule::fixed(0.2)}},
                             50000, {50000});
  const auto rows = run_experiment(c, worker_count());
  for (double budget : {0.0, 50.0}) {
    const auto& r = find_row(rows, LearnerKind::FixedMW, 0.4, budget, 50000);
    const double bound = 4 * kLog2 / 0.4 + 4 * budget + 3 * r.stderr_pseudo_regret;
    o.expect(r.mean_pseudo_regret <= bound, "C=" + num(budget) + " mean=" + num(r.mean_pseudo_regret) +
                                                " <= " + num(bound));
  }
  return o;
}

// FTRL at gap 0.4 for C in {0, 100, 200}, shared by criteria 2 and 3.
std::vector<AggregateRow> ftrl_rows() {
  const auto c = base_config({0.4}, {0.0, 100.0, 200.0},
                             {{LearnerKind::AdaptiveFTRL, StepSchedule::adaptive(kAlpha)}}, 100000,
                             {50000, 100000});
  return run_experiment(c, worker_count());
}

Outcome adaptive_constant_regret(const std::vector<AggregateRow>& rows) {
  Outcome o;
  for (double budget : {0.0, 100.0}) {
    const auto& full = find_row(rows, LearnerKind::AdaptiveFTRL, 0.4, budget, 100000);
    const auto& half = find_row(rows, LearnerKind::AdaptiveFTRL, 0.4, budget, 50000);
    const double growth = full.mean_pseudo_regret - half.mean_pseudo_regret;
    o.expect(growth <= 0.5, "C=" + num(budget) + " R(T)-R(T/2)=" + num(growth) + " <= 0.5");
    const double ceiling = 16 * (109 * kLog2 / 0.4 + 2 * budget);
    o.expect(full.mean_pseudo_regret <= ceiling,
             "C=" + num(budget) + " R(T)=" + num(full.mean_pseudo_regret) + " <= " + num(ceiling));
  }
  return o;
}

Outcome linear_in_corruption(const std::vector<AggregateRow>& rows) {
  Outcome o;
  const double p100 = find_row(rows, LearnerKind::AdaptiveFTRL, 0.4, 100.0, 100000).mean_pseudo_regret;
  const double p200 = find_row(rows, LearnerKind::AdaptiveFTRL, 0.4, 200.0, 100000).mean_pseudo_regret;
  const double diff = p200 - p100;
  o.expect(diff >= 25 && diff <= 400, "plateau(200)-plateau(100)=" + num(diff) + " in [25, 400]");
  return o;
}

Outcome omd_inferiority() {
  Outcome o;
  const double gap = 0.1, budget = 200;
  const double t1_exact =
      std::min(std::pow(2.0, -6) * budget / (gap * gap), std::exp(0.25 * std::sqrt(budget) / kAlpha));
  const auto t1 = static_cast<std::uint64_t>(std::lround(t1_exact));
  const auto omd = AlgorithmSpec{LearnerKind::AdaptiveOMD, StepSchedule::adaptive(kAlpha)};
  const auto ftrl = AlgorithmSpec{LearnerKind::AdaptiveFTRL, StepSchedule::adaptive(kAlpha)};

  const auto early = run_experiment(base_config({gap}, {budget}, {omd}, t1, {t1}), worker_count());
  const double threshold = 0.5 * gap * static_cast<double>(t1);
  o.expect(early.front().mean_pseudo_regret >= threshold,
           "T1=" + std::to_string(t1) + " (exact " + num(t1_exact) + ") OMD R(T1)=" +
               num(early.front().mean_pseudo_regret) + " >= " + num(threshold));

  const auto late =
      run_experiment(base_config({0.05}, {budget}, {omd, ftrl}, 100000, {100000}), worker_count());
  const double omd_plateau = find_row(late, LearnerKind::AdaptiveOMD, 0.05, budget, 100000).mean_pseudo_regret;
  const double ftrl_plateau = find_row(late, LearnerKind::AdaptiveFTRL, 0.05, budget, 100000).mean_pseudo_regret;
  o.expect(omd_plateau >= 2 * ftrl_plateau, "gap=0.05 C=200 OMD " + num(omd_plateau) +
                                                " >= 2 x FTRL " + num(ftrl_plateau));
  return o;
}

Outcome inequality_suite() {
  Outcome o;
  verify::SuiteOptions opts;
  opts.threads = worker_count();
  for (const auto& r : verify::run_suite(opts)) {
    o.expect(r.ok(), r.check + " instances=" + std::to_string(r.instances) + " violations=" +
                         std::to_string(r.violations) + " worst_slack=" + num(r.worst_slack));
  }
  return o;
}

Outcome ftrl_omd_equivalence() {
  Outcome o;
  Rng rng(trial_seed(kSeed, 6));
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 15);
    const std::size_t t = 1 + static_cast<std::size_t>(uniform01(rng) * 1000);
    const double eta = 1.0 - uniform01(rng);
    verify::LossMatrix g(t, std::vector<double>(n));
    for (auto& row : g)
      for (double& x : row) x = 2 * uniform01(rng) - 1;
    worst = std::max(worst, verify::max_trajectory_deviation(g, StepSchedule::fixed(eta)));
  }
  o.expect(worst <= 1e-12, "fixed step: max deviation over 100 instances " + num(worst) + " <= 1e-12");

  // Adaptive schedules on the lower-bound instance of criterion 4, up to T1.
  auto inst = lower_bound_instance(0.1, 200);
  const double t1_exact =
      std::min(std::pow(2.0, -6) * 200 / 0.01, std::exp(0.25 * std::sqrt(200.0) / kAlpha));
  const auto t1 = static_cast<std::uint64_t>(std::lround(t1_exact));
  const auto schedule = StepSchedule::adaptive(kAlpha);
  const auto trace = play_protocol(inst.spec, inst.corruption,
                                   Learner(LearnerKind::AdaptiveOMD, schedule, 2), t1,
                                   trial_seed(kSeed, 0), RecordPolicy::All);
  verify::LossMatrix g;
  for (const auto& r : trace.records()) g.emplace_back(r.corrupted.values().begin(), r.corrupted.values().end());
  const double divergence = verify::max_trajectory_deviation(g, schedule);
  o.expect(divergence > 0.1, "adaptive: max deviation up to T1=" + std::to_string(t1) + " is " +
                                 num(divergence) + " > 0.1");
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome sweep_determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "cmw_acceptance_sweep";
  std::filesystem::create_directories(dir);
  const auto config = dir / "config.json";
  std::ofstream(config) << R"({"delta": [0.05, 0.4], "budgets": [0, 50], "horizon": 5000,
    "trials": 20, "base_seed": 11, "algorithms": ["adaptive_ftrl", "adaptive_omd", "fixed_mw"]})";
  std::vector<std::string> outputs;
  for (int run = 0; run < 2; ++run) {
    const auto out = dir / ("run" + std::to_string(run) + ".csv");
    std::filesystem::remove(out);
    const std::string cmd = std::string(MWSIM_PATH) + " sweep --config " + config.string() + " --out " +
                            out.string() + " --seed 12345 --threads " +
                            std::to_string(run + 1) + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    o.expect(status == 0, "sweep run " + std::to_string(run) + " exit status " + std::to_string(status));
    outputs.push_back(slurp(out));
  }
  o.expect(!outputs[0].empty() && outputs[0] == outputs[1],
           "byte-identical CSVs (" + std::to_string(outputs[0].size()) + " bytes)");
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& run) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.expect(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << '\n';
    for (const auto& d : o.details) std::cout << "         " << d << '\n';
    std::cout.flush();
    failed += o.pass ? 0 : 1;
  };

  report(1, "fixed-step bound 4 log N / gap + 4C", fixed_step_bound);
  const auto rows = ftrl_rows();
  report(2, "adaptive FTRL constant pseudo regret", [&] { return adaptive_constant_regret(rows); });
  report(3, "FTRL plateau grows linearly in C", [&] { return linear_in_corruption(rows); });
  report(4, "OMD lower bound and inferiority to FTRL", omd_inferiority);
  report(5, "inequality certification suite", inequality_suite);
  report(6, "fixed-step FTRL/OMD equivalence and adaptive divergence", ftrl_omd_equivalence);
  report(7, "sweep determinism", sweep_determinism);

  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}
