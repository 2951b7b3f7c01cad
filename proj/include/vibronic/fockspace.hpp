#pragma once
// Two qubits tensored with two truncated bosonic modes (center of mass "c",
// stretch "r"). Basis ordering of the joint space is fixed:
//
//   index = (e * (n_max_c + 1) + n_c) * (n_max_r + 1) + n_r
//
// with the electronic index e slowest: |dd> = 0, |du> = 1, |ud> = 2, |uu> = 3,
// where the first letter is ion 1 and "u" is the excited level.
//
// Units: hbar = 1, frequencies in units of the c.m. trap frequency nu.

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <tuple>
#include <variant>
#include <vector>

#include "vibronic/diagnostics.hpp"

namespace vibronic {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

enum class Electronic : int { dd = 0, du = 1, ud = 2, uu = 3 };
inline constexpr int kElectronicDim = 4;

enum class Mode { c, r };

struct HilbertConfig {
  int n_max_c = 0;
  int n_max_r = 0;

  int levels(Mode m) const { return (m == Mode::c ? n_max_c : n_max_r) + 1; }
  int vib_dim() const { return (n_max_c + 1) * (n_max_r + 1); }
  int dim() const { return kElectronicDim * vib_dim(); }
  int vib_index(int n_c, int n_r) const { return n_c * (n_max_r + 1) + n_r; }
  int index(Electronic e, int n_c, int n_r) const {
    return static_cast<int>(e) * vib_dim() + vib_index(n_c, n_r);
  }
  bool contains(int n_c, int n_r) const {
    return n_c >= 0 && n_r >= 0 && n_c <= n_max_c && n_r <= n_max_r;
  }
  void validate() const;

  friend bool operator==(const HilbertConfig&, const HilbertConfig&) = default;
};

struct ModeParams {
  double eta = 0.1;    ///< c.m. Lamb-Dicke parameter
  double eta_r = 0.0;  ///< stretch Lamb-Dicke parameter
  double nu = 1.0;     ///< c.m. trap frequency (the unit)

  /// Stretch parameter from nu_r = sqrt(3) nu and eta ~ nu^(-1/2).
  static double default_eta_r(double eta);
  static ModeParams from_eta(double eta) { return {eta, default_eta_r(eta), 1.0}; }
  void validate() const;
};

/// Pure state on the joint electronic x vibrational space.
struct JointState {
  HilbertConfig config;
  CVector amplitudes;

  static JointState basis(const HilbertConfig& cfg, Electronic e, int n_c, int n_r);
  /// |electronic> (x) |vib>; vib is a vector over the two-mode Fock grid.
  static JointState product(const HilbertConfig& cfg, const std::array<cplx, 4>& electronic,
                            const CVector& vib);

  cplx amplitude(Electronic e, int n_c, int n_r) const {
    return amplitudes[config.index(e, n_c, n_r)];
  }
  double norm() const { return amplitudes.norm(); }
};

/// Density matrix over the two-mode Fock grid of a HilbertConfig.
struct VibDensity {
  HilbertConfig config;
  CMatrix matrix;

  double population(int n_c, int n_r) const {
    return matrix(config.vib_index(n_c, n_r), config.vib_index(n_c, n_r)).real();
  }
  /// Diagonal populations, indexed by HilbertConfig::vib_index.
  Eigen::VectorXd populations() const { return matrix.diagonal().real(); }
};

struct DensityCheck {
  double hermiticity_error = 0.0;  ///< max |rho - rho^dagger|
  double trace_error = 0.0;        ///< |tr rho - 1|
  double min_eigenvalue = 0.0;
  bool ok() const {
    return hermiticity_error <= 1e-12 && trace_error <= 1e-9 && min_eigenvalue >= -1e-10;
  }
};

DensityCheck check_density(const VibDensity& rho);

/// Warns when either mode carries more than `threshold` population in its top
/// two Fock levels. Returns true if the guard band is clean.
bool check_truncation(const VibDensity& rho, Diagnostics* diag, double threshold = 1e-6);
bool check_truncation(const JointState& psi, Diagnostics* diag, double threshold = 1e-6);

// ---------------------------------------------------------------------------
// Special functions

/// Associated Laguerre polynomial L_n^k(x) by the upward three-term recurrence.
double laguerre(int n, int k, double x);

/// n! / (n - k)!, zero when n < k.
double falling_factorial(int n, int k);
/// (n + k)! / n!
double rising_factorial(int n, int k);

/// Diagonal coupling coefficient
///   f_k(n_c, n_r) = exp(-(eta^2 + eta_r^2) / 2) * n_c! / (n_c + k)! * L_{n_c}^k(eta^2) * L_{n_r}^0(eta_r^2)
double coupling_f(int n_c, int n_r, int k, const ModeParams& modes);

// ---------------------------------------------------------------------------
// Operators and states

struct ModeOperators {
  CMatrix a, a_dag, n_c;
  CMatrix b, b_dag, n_r;
};

/// Truncated ladder operators lifted to the full joint space.
ModeOperators mode_operators(const HilbertConfig& cfg);

/// Truncated single-mode annihilation operator with `levels` Fock levels.
CMatrix annihilation(int levels);

/// exp(alpha a^dagger - conj(alpha) a) on the truncated space of one mode.
/// Warns when |alpha|^2 > n_max / 4.
CMatrix displacement(cplx alpha, Mode mode, const HilbertConfig& cfg, Diagnostics* diag = nullptr);

struct FockSpec {
  int n_c = 0;
  int n_r = 0;
};
struct ThermalSpec {
  double nbar_c = 0.0;
  double nbar_r = 0.0;
};
struct CoherentSpec {
  cplx alpha_c{};
  cplx alpha_r{};
};
struct SuperpositionSpec {
  std::vector<std::tuple<int, int, cplx>> terms;  ///< (n_c, n_r, amplitude), renormalized
};
using StateSpec = std::variant<FockSpec, ThermalSpec, CoherentSpec, SuperpositionSpec>;

VibDensity make_vib_state(const StateSpec& spec, const HilbertConfig& cfg,
                          Diagnostics* diag = nullptr);

/// Pure two-mode vector for the pure kinds of StateSpec (throws for thermal).
CVector make_vib_vector(const StateSpec& spec, const HilbertConfig& cfg);

/// |<target|state>|^2
double fidelity(const JointState& state, const JointState& target);

/// 4x4 reduced electronic density matrix.
Eigen::Matrix4cd reduce_electronic(const JointState& psi);
/// Reduced vibrational density matrix.
VibDensity reduce_vibrational(const JointState& psi);

/// 0.5 * trace norm of (a - b).
double trace_distance(const VibDensity& a, const VibDensity& b);

}  // namespace vibronic
