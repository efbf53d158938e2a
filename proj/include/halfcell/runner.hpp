#pragma once

#include "halfcell/config.hpp"
#include "halfcell/io.hpp"

namespace halfcell {

struct RunResult {
  int exit_code = 0;        // 0 ok, 1 numerical failure, 2 invalid configuration
  json result;              // also written to <out>/<subcommand>.json
  std::string summary;      // one-line human summary
};

// Dispatches a CLI subcommand: lambda, mu, cell, effective, homogenize, mc,
// bavg, audit. Writes JSON/CSV artifacts into out_dir (created if needed).
RunResult run_subcommand(const std::string& cmd, const RunConfig& cfg,
                         const std::string& out_dir);

}  // namespace halfcell
