// mwsim: corrupted-experts simulator.
//
//   mwsim run   --config cfg.json [--out results.csv] [--threads k] [--seed s]
//   mwsim sweep --config cfg.json [--out results.csv] [--threads k] [--seed s]
//   mwsim verify [--threads k] [--seed s]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "cmw/harness.hpp"
#include "cmw/verify.hpp"

namespace {

struct RunOptions {
  std::string config;
  std::optional<std::string> out;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
};

void add_run_options(CLI::App* cmd, RunOptions& opts) {
  cmd->add_option("--config", opts.config, "JSON experiment config")->required();
  cmd->add_option("--out", opts.out, "CSV output path (overrides config 'output')");
  cmd->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts.seed, "base seed (overrides config 'base_seed')");
}

int run_grid(const RunOptions& opts, bool is_sweep) {
  cmw::ExperimentConfig config = cmw::load_config(opts.config);
  if (opts.out) config.output = *opts.out;
  if (opts.seed) config.base_seed = *opts.seed;
  const auto rows = is_sweep ? cmw::sweep(config, opts.threads)
                             : cmw::run_experiment(config, opts.threads);
  cmw::write_csv(rows, config.output);
  std::cerr << "wrote " << rows.size() << " rows to " << config.output << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplicative weights under corrupted stochastic losses"};
  app.require_subcommand(1);

  RunOptions run_opts, sweep_opts;
  add_run_options(app.add_subcommand("run", "run one instance over its budgets"), run_opts);
  add_run_options(app.add_subcommand("sweep", "run the algorithm x delta x C grid"), sweep_opts);

  cmw::verify::SuiteOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "certify the regret inequalities numerically");
  verify_cmd->add_option("--threads", verify_opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", verify_opts.seed, "suite seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return run_grid(run_opts, false);
    if (app.got_subcommand("sweep")) return run_grid(sweep_opts, true);
    bool all_ok = true;
    for (const auto& report : cmw::verify::run_suite(verify_opts)) {
      std::cout << report.to_json() << '\n';
      all_ok = all_ok && report.ok();
    }
    return all_ok ? 0 : 1;
  } catch (const cmw::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
