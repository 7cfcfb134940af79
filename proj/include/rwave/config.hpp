#pragma once

#include <string>

#include "json.hpp"
#include "rwave/experiments.hpp"
#include "rwave/solver.hpp"

namespace rwave {

// Parsed and validated run description. `params` holds the experiment-
// specific knobs (validated by the runner); `echo` is the full effective
// configuration with defaults applied, whose canonical dump identifies the
// run (the output directory does not enter the hash).
struct RunConfig {
  std::string experiment;
  GridSpec grid;
  DataSpec data;
  EnsembleSpec ensemble;
  SolverConfig dynamics;
  nlohmann::json params;
  std::string output_dir;  // empty unless set in the file
  std::string tag;
  nlohmann::json echo;
};

// Strict parse: unknown keys, unknown enum strings, and ill-typed values all
// throw std::invalid_argument.
RunConfig parse_config(const nlohmann::json& j);

RunConfig load_config_file(const std::string& path);

const std::vector<std::string>& known_experiments();

}  // namespace rwave
