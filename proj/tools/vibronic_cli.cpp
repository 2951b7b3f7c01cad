// Batch front-end: vibronic [mode] --config <path> [--out <dir>] [--seed <u64>]
//                           [--threads <n>] [--quiet]

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "vibronic/runner.hpp"

int main(int argc, char** argv) {
  using namespace vibronic::cli;

  CLI::App app{"Two-ion vibronic simulation and motional-state tomography"};
  std::string mode;
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool quiet = false;

  app.add_option("mode", mode, "Mode override; `validate` runs without a config file");
  app.add_option("--config", config_path, "Run configuration file");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed override (u64)");
  app.add_option("--threads", threads, "Worker threads");
  app.add_flag("--quiet", quiet, "Suppress summaries on standard output");
  app.set_version_flag("--version", VIBRONIC_VERSION);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const RunOptions opts{out_dir, quiet};
  if (config_path.empty()) {
    if (mode != "validate") {
      std::cerr << "config error: --config is required for mode '" << (mode.empty() ? "?" : mode) << "'\n";
      return kConfigError;
    }
    try {
      RunConfig cfg = parse_config("[run]\nmode = validate\n");
      apply_overrides(cfg, seed, threads);
      return run(cfg, opts, std::cout, std::cerr);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    }
  }
  if (!mode.empty()) {
    std::cerr << "config error: the mode is taken from [run] mode when --config is given\n";
    return kConfigError;
  }
  return run_file(config_path, opts, seed, threads, std::cout, std::cerr);
}
