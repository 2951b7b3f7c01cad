#pragma once
// Mode dispatch for the batch front-end. Every output file starts with the
// artifact version and the resolved configuration as "# key = value" lines.

#include <filesystem>
#include <iosfwd>

#include "vibronic/config.hpp"

namespace vibronic::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
};

/// Runs one configured mode. Summaries go to `out`, diagnostics to `err`.
/// Module errors are mapped to exit codes; nothing is thrown.
int run(const RunConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);

/// parse_config on a file, then run. Used by the executable and by tests.
int run_file(const std::filesystem::path& config_path, const RunOptions& opts,
             std::optional<std::uint64_t> seed, std::optional<int> threads, std::ostream& out,
             std::ostream& err);

}  // namespace vibronic::cli
