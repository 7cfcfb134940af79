#pragma once

#include <string>
#include <vector>

#include "rwave/config.hpp"

namespace rwave {

struct RunOutcome {
  std::string dir;
  std::vector<std::string> outputs;  // payload files, relative to dir
};

// Precedence: command-line flag, then RWAVE_OUTPUT_DIR, then the config file,
// then runs/<tag>-<hash8>.
std::string resolve_output_dir(const RunConfig& cfg, const std::string& flag_dir);

// Checks the experiment-specific params section; throws std::invalid_argument
// on unknown keys or out-of-range values. Does not run anything.
void validate_params(const RunConfig& cfg);

// Runs the experiment and writes its payload tables, summary.json, and
// (last) manifest.json into out_dir.
RunOutcome run_experiment(const RunConfig& cfg, const std::string& out_dir);

// Plain-language account of what the run would compute, with the effective
// settings.
std::string describe_experiment(const RunConfig& cfg);

}  // namespace rwave
