#pragma once
// Run configuration for the batch front-end. Text format:
//
//   # comment
//   [section]
//   key = value
//
// Unknown sections and keys, duplicate keys, out-of-range values and missing
// required keys are errors that name the key and line.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vibronic/bellgen.hpp"
#include "vibronic/record_io.hpp"

namespace vibronic::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class RunMode { spectrum, evolve, bell_phi, bell_psi, tomo_synth, tomo_invert, wigner, validate };

std::string_view mode_name(RunMode m);

struct RunConfig {
  RunMode mode = RunMode::validate;
  HilbertConfig hilbert{10, 0};
  BichromaticParams drive;
  CarrierParams carrier;
  StateSpec state = FockSpec{};

  // spectrum
  int grid_n_c = 25;
  int grid_n_r = 25;

  // evolve / bell
  Engine engine = Engine::effective;
  double t = 0.0;
  double dt_max = 0.01;
  BellSign sign = BellSign::plus;

  // tomography
  std::vector<double> taus;  ///< empty: uniform grid of tau_count samples
  int tau_count = 0;         ///< 0: 4 x unknowns
  std::uint64_t shots = 0;
  int n_fit_c = 10;
  int n_fit_r = 0;
  double ridge = 0.0;
  std::vector<std::pair<cplx, cplx>> alphas{{cplx{}, cplx{}}};
  std::string record_path;

  std::uint64_t seed = 0;
  int threads = 1;

  /// Every resolved setting as ("section.key", value) in a fixed order.
  io::HeaderFields resolved;
};

RunConfig parse_config(std::string_view text);

/// Applies --seed / --threads overrides and refreshes the echoed fields.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> threads);

}  // namespace vibronic::cli
