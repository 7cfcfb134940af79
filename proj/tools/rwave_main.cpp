#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "rwave/config.hpp"
#include "rwave/io.hpp"
#include "rwave/kernels.hpp"
#include "rwave/runner.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

// 0: success.  1: configuration or validation problem.  2: runtime failure.
enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

int apply_threads(int threads) {
  if (threads < 0) {
    std::fprintf(stderr, "configuration error: --threads must be non-negative\n");
    return kConfigError;
  }
  if (threads == 1) {
    rwave::kernels::set_exec_policy(rwave::kernels::Exec::serial);
  } else if (threads > 1) {
    rwave::kernels::set_exec_policy(rwave::kernels::Exec::openmp);
#ifdef _OPENMP
    omp_set_num_threads(threads);
#else
    std::fprintf(stderr, "note: built without OpenMP, running serially\n");
#endif
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospectral ensemble runner for the quintic wave equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  int threads = 0;  // 0: keep the build default
  bool validate_only = false;

  auto* run = app.add_subcommand("run", "run an experiment described by a JSON file");
  run->add_option("config", config_path, "JSON configuration file")->required();
  run->add_flag("--validate-only", validate_only,
                "parse and validate the configuration, run nothing");
  run->add_option("--threads", threads, "worker threads (1 forces serial kernels)");
  run->add_option("--output-dir", out_dir,
                  "output directory (overrides RWAVE_OUTPUT_DIR and the file)");

  auto* describe =
      app.add_subcommand("describe", "explain what a configuration would compute");
  describe->add_option("config", config_path, "JSON configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_name() == "CallForHelp" ? kOk : kConfigError;
  }

  rwave::RunConfig cfg;
  try {
    cfg = rwave::load_config_file(config_path);
    rwave::validate_params(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  }

  if (describe->parsed()) {
    std::fputs(rwave::describe_experiment(cfg).c_str(), stdout);
    return kOk;
  }

  if (const int rc = apply_threads(threads); rc != kOk) return rc;

  if (validate_only) {
    std::printf("configuration ok: experiment %s, hash %s\n", cfg.experiment.c_str(),
                rwave::io::config_hash8(cfg.echo).c_str());
    return kOk;
  }

  const std::string dir = rwave::resolve_output_dir(cfg, out_dir);
  try {
    const rwave::RunOutcome outcome = rwave::run_experiment(cfg, dir);
    std::printf("experiment %s finished, %zu payload files in %s\n",
                cfg.experiment.c_str(), outcome.outputs.size(), outcome.dir.c_str());
    for (const auto& f : outcome.outputs) std::printf("  %s\n", f.c_str());
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "runtime error: %s\n", e.what());
    return kRuntimeError;
  }
}
