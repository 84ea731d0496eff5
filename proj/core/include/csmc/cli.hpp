#pragma once

#include <iosfwd>
#include <string>

#include "csmc/config.hpp"

namespace csmc {

struct CliOptions {
  int threads = 1;
  std::string out_override;  // overrides config `out`
  bool timing = false;       // real wall_ms in CSV; forfeits byte-identity
};

// Subcommand drivers. Exit code 0 on success, 2 on experiment-assertion
// failure (failure rate > 5%, or a clt-check outside its bands), 1 on error.
// Diagnostics (including failing replicate seeds) go to `diag`.
int run_subcommand_run(const RunConfig& cfg, const CliOptions& opts,
                       std::ostream& diag);
int run_subcommand_sweep(const RunConfig& cfg, const CliOptions& opts,
                         std::ostream& diag);
int run_subcommand_mlmc(const RunConfig& cfg, const CliOptions& opts,
                        std::ostream& diag);
int run_subcommand_clt_check(const RunConfig& cfg, const CliOptions& opts,
                             std::ostream& diag);

}  // namespace csmc
