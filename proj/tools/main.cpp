// csmc: coupled sequential Monte Carlo experiments.
//
//   csmc run       --config cfg  one batch of coupled filter replicates
//   csmc sweep     --config cfg  variance-vs-level or variance-vs-horizon sweep
//   csmc mlmc      --config cfg  multilevel estimate with per-level terms
//   csmc clt-check --config cfg  scaled errors against the finite-state oracle

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <thread>

#include "csmc/cli.hpp"
#include "csmc/errors.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("COUPLED_SMC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled sequential Monte Carlo toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  csmc::CliOptions opts;
  opts.threads = default_threads();

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key = value)")
        ->required();
    cmd->add_option("--threads", opts.threads, "worker threads");
    cmd->add_option("--out", opts.out_override, "output CSV path override");
    cmd->add_flag("--timing", opts.timing,
                  "record real wall_ms (CSV no longer byte-stable)");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "replicate batch");
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "level or horizon sweep");
  CLI::App* cmd_mlmc = app.add_subcommand("mlmc", "multilevel estimate");
  CLI::App* cmd_clt = app.add_subcommand("clt-check", "CLT check vs oracle");
  for (CLI::App* cmd : {cmd_run, cmd_sweep, cmd_mlmc, cmd_clt})
    add_common(cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    const csmc::RunConfig cfg = csmc::load_config_file(config_path);
    if (cmd_run->parsed())
      return csmc::run_subcommand_run(cfg, opts, std::cerr);
    if (cmd_sweep->parsed())
      return csmc::run_subcommand_sweep(cfg, opts, std::cerr);
    if (cmd_mlmc->parsed())
      return csmc::run_subcommand_mlmc(cfg, opts, std::cerr);
    if (cmd_clt->parsed())
      return csmc::run_subcommand_clt_check(cfg, opts, std::cerr);
  } catch (const csmc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
