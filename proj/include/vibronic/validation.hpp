#pragma once
// Property checks shared by the acceptance binary and the `validate` mode.
// Each check returns one result line; thresholds are fixed here.

#include <cstdint>
#include <string>
#include <vector>

namespace vibronic::validation {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

CheckResult closed_form_equivalence(std::uint64_t seed);
CheckResult decoupling(std::uint64_t seed);
CheckResult bell_generation();
CheckResult adiabatic_validity();
CheckResult rabi_spectrum_distinct();
CheckResult lamb_dicke_robustness();
CheckResult wigner_oracles();
CheckResult tomography_noiseless();
CheckResult tomography_shot_noise(std::uint64_t seed);
CheckResult determinism(std::uint64_t seed);

std::vector<CheckResult> run_all(std::uint64_t seed);

}  // namespace vibronic::validation
