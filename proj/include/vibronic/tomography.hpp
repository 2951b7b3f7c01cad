#pragma once
// Motional-state measurement: displace the vibrational state, record the
// |dd> survival probability under the dispersive drive,
//
//   P_dd(tau) = sum_{n_c, n_r} cos^2(|W_{n_c n_r}| tau) Pi_{n_c n_r},
//
// invert the record for the displaced populations Pi, and form the two-mode
// Wigner function (4 / pi^2) sum (-1)^(n_c + n_r) Pi.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vibronic/dynamics.hpp"

namespace vibronic {

struct SignalSample {
  double tau = 0.0;
  double p_dd = 0.0;
  std::uint64_t shots = 0;  ///< 0: exact probability
};

struct SignalRecord {
  std::vector<SignalSample> samples;
  BichromaticParams params;
  std::uint64_t seed = 0;

  /// Throws unless taus are strictly increasing and p_dd lies in [0, 1].
  void validate() const;
};

struct PopulationEstimate {
  int n_fit_c = 0;
  int n_fit_r = 0;
  std::vector<double> pi;  ///< row-major over (n_c, n_r), n_r fastest
  double residual_norm = 0.0;
  double condition_number = 0.0;

  double at(int n_c, int n_r) const { return pi[static_cast<std::size_t>(n_c * (n_fit_r + 1) + n_r)]; }
  double total() const;
};

struct WignerPoint {
  cplx alpha_c{};
  cplx alpha_r{};
  double w = 0.0;
};

/// 4 / pi^2, the value at the origin for the vacuum.
double wigner_scale();

/// D_c^dagger(alpha_c) D_r^dagger(alpha_r) rho D_r(alpha_r) D_c(alpha_c).
VibDensity displace_vib(const VibDensity& rho, cplx alpha_c, cplx alpha_r,
                        Diagnostics* diag = nullptr);

/// |W_{n_c n_r}| over 0..n_c_max x 0..n_r_max, n_r fastest.
std::vector<double> fit_frequencies(const BichromaticParams& p, int n_c_max, int n_r_max);

/// Survival signal of an already displaced state. shots = 0 gives exact values;
/// otherwise each sample is count / shots with count ~ Binomial(shots, P_dd),
/// drawn from an independent stream keyed by (seed, sample index).
SignalRecord synth_signal(const VibDensity& rho, std::span<const double> taus,
                          const BichromaticParams& p, std::uint64_t shots, std::uint64_t seed);

/// Non-negative least squares on the cos^2 design matrix with an optional ridge
/// term. Throws DegenerateDesign when fit frequencies collide or the design is
/// rank deficient.
PopulationEstimate invert_populations(const SignalRecord& record, int n_fit_c, int n_fit_r,
                                      double ridge = 0.0);

double wigner_from_populations(const PopulationEstimate& est);
/// Parity sum over the diagonal of a density matrix.
double wigner_from_density(const VibDensity& displaced);

/// Ground-truth Wigner value from exact displaced populations.
double wigner_direct(const VibDensity& rho, cplx alpha_c, cplx alpha_r,
                     Diagnostics* diag = nullptr);

struct ProtocolOptions {
  int n_fit_c = 4;
  int n_fit_r = 0;
  double ridge = 0.0;
  int threads = 1;
};

struct ProtocolPoint {
  WignerPoint point;
  PopulationEstimate estimate;
  SignalRecord record;
  Diagnostics diagnostics;
};

/// Per displacement point: displace, synthesize, invert, parity sum. Point i
/// draws its shot noise from seed stream derive_seed(seed, i), so results do not
/// depend on the thread count.
std::vector<ProtocolPoint> protocol_run(const VibDensity& rho,
                                        std::span<const std::pair<cplx, cplx>> alphas,
                                        std::span<const double> taus, const BichromaticParams& p,
                                        std::uint64_t shots, std::uint64_t seed,
                                        const ProtocolOptions& opts);

struct ConditionReport {
  double min_gap = 0.0;           ///< smallest |W_i - W_j| on the fit grid
  double min_relative_gap = 0.0;  ///< min_gap relative to the larger of the pair
  std::pair<int, int> closest_pair{-1, -1};  ///< grid indices of that pair
  double condition_number = 0.0;  ///< of the unconstrained design for the given taus
  double tau_span = 0.0;
  double recommended_tau_span = 0.0;  ///< pi / min_gap
  bool resolved = false;
  std::vector<std::string> notes;
};

inline constexpr double kConditionThreshold = 1e8;

ConditionReport condition_report(const BichromaticParams& p, int n_fit_c, int n_fit_r,
                                 std::span<const double> taus);

/// 4 x unknowns uniformly spaced samples over [0, pi / min_gap].
std::vector<double> default_tau_grid(const BichromaticParams& p, int n_fit_c, int n_fit_r);
/// `count` uniformly spaced samples over [0, pi / min_gap].
std::vector<double> tau_grid(const BichromaticParams& p, int n_fit_c, int n_fit_r, int count);

/// Independent 64-bit stream key for substream `index` of `seed` (splitmix64).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace vibronic
