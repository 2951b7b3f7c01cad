#pragma once
// Hamiltonians of the bichromatic sideband drive, its dispersive effective
// form, and the carrier drive; effective Rabi frequencies; propagators.
//
// Phase conventions: a complex Rabi scale Omega enters every Hamiltonian as
// Omega * X + conj(Omega) * X^dagger, so arg(Omega) acts as an extra laser
// phase. The effective theory therefore uses phi + arg(Omega) wherever the
// laser phase phi appears (see effective_phi).

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vibronic/fockspace.hpp"

namespace vibronic {

struct BichromaticParams {
  int k = 1;                ///< sideband order of the blue-detuned field
  int k_prime = 1;          ///< sideband order of the red-detuned field
  double delta = 0.1;       ///< detuning of field I from the k-th sideband
  double delta_prime = 0.1; ///< detuning of field II from the k'-th sideband
  cplx omega{0.01, 0.0};    ///< Rabi scale
  double phi = 0.0;         ///< common laser phase
  double phi0 = 0.0;        ///< q d, phase difference from the ion spacing
  ModeParams modes = ModeParams::from_eta(0.1);

  bool symmetric() const { return k == k_prime && delta == delta_prime; }
  void validate() const;
};

struct CarrierParams {
  cplx omega{0.01, 0.0};
  double varphi = 0.0;   ///< laser phase
  double varphi0 = 0.0;  ///< q0 d
  ModeParams modes = ModeParams::from_eta(0.1);
};

/// phi + arg(omega): the laser phase seen by the effective two-photon coupling.
double effective_phi(const BichromaticParams& p);

/// Omega_k = 2 |Omega|^2 (i eta)^(2k) / delta. Real; (i)^(2k) = (-1)^k.
/// Throws SingularParameter for delta == 0.
double omega_k_scale(int k, cplx omega, double delta, double eta);

/// Omega_k * f_k(n_c, n_r)^2 * [n_c!/(n_c-k)! - (n_c+k)!/n_c!]; the first
/// bracket term vanishes for n_c < k. Requires the symmetric drive.
double rabi_effective(int n_c, int n_r, const BichromaticParams& p);

/// Table of effective Rabi frequencies over 0..n_c_max x 0..n_r_max.
struct RabiSpectrum {
  BichromaticParams params;
  int n_c_max = 0;
  int n_r_max = 0;
  std::vector<double> values;  ///< row-major, n_r fastest

  double at(int n_c, int n_r) const { return values[n_c * (n_r_max + 1) + n_r]; }
};

RabiSpectrum rabi_spectrum(const BichromaticParams& p, int n_c_max, int n_r_max);

/// Interaction-picture Hamiltonian of the two-tone drive at time t.
CMatrix build_bichromatic_H(double t, const BichromaticParams& p, const HilbertConfig& cfg);

/// Time-independent dispersive Hamiltonian, including the self-energy term.
/// Warns when delta < 10 x the largest vibronic Rabi frequency on the grid.
CMatrix build_effective_H(const BichromaticParams& p, const HilbertConfig& cfg,
                          Diagnostics* diag = nullptr);

/// Carrier Hamiltonian, diagonal in the Fock basis.
CMatrix build_carrier_H(const CarrierParams& p, const HilbertConfig& cfg);

/// exp(-i H t) through one Hermitian eigendecomposition, reusable over many t.
class HermitianPropagator {
 public:
  /// Throws NumericalError when ||H - H^dagger|| > 1e-10 ||H||.
  explicit HermitianPropagator(const CMatrix& h);

  JointState evolve(const JointState& psi0, double t) const;
  CMatrix unitary(double t) const;
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

 private:
  Eigen::VectorXd evals_;
  CMatrix evecs_;
};

JointState propagate_const(const CMatrix& h, const JointState& psi0, double t);

struct TimeDepOptions {
  double dt_max = 0.01;
  bool check_halving = false;  ///< rerun with dt/2 and report the change
  double tolerance = 1e-8;     ///< warn when the halving change exceeds this
};

struct TimeDepResult {
  JointState state;
  std::size_t steps = 0;
  double halving_change = -1.0;  ///< ||psi(dt) - psi(dt/2)||, -1 when not checked
};

using HamiltonianBuilder = std::function<CMatrix(double)>;

/// Fixed-step midpoint exponential: psi <- exp(-i H(t_mid) dt) psi, dt <= dt_max.
TimeDepResult propagate_timedep(const HamiltonianBuilder& builder, const JointState& psi0,
                                double t, const TimeDepOptions& opts, Diagnostics* diag = nullptr);

/// Evolution under the symmetric two-tone Hamiltonian. Because
/// H(t) = R(t) H(0) R(t)^dagger with R(t) = exp(i (delta/k) t n_c), the exact
/// propagator is R(t) exp(-i (H(0) + (delta/k) n_c) t); the midpoint stepper
/// reuses exp(-i H(0) dt) between two diagonal phase rotations.
class BichromaticEvolution {
 public:
  BichromaticEvolution(const BichromaticParams& p, const HilbertConfig& cfg);

  JointState exact(const JointState& psi0, double t) const;
  TimeDepResult midpoint(const JointState& psi0, double t, const TimeDepOptions& opts,
                         Diagnostics* diag = nullptr) const;

 private:
  JointState midpoint_run(const JointState& psi0, double t, std::size_t steps) const;
  CVector frame_phases(double t) const;

  BichromaticParams params_;
  HilbertConfig cfg_;
  CMatrix h0_;
  HermitianPropagator rotating_;
  Eigen::VectorXd n_c_;  ///< n_c of every joint basis index
};

/// Amplitudes on (|dd>, |uu>) after time t from |dd> (x) |n_c, n_r> under the
/// effective Hamiltonian, including the Fock-dependent global phase
/// exp(-i (-1)^k W t) with W the effective Rabi frequency.
std::array<cplx, 2> closed_form_dispersive(int n_c, int n_r, const BichromaticParams& p, double t);

enum class BellSign { plus, minus };

/// Amplitudes on (|dd>, |du>, |ud>, |uu>) after a carrier pulse of length t0
/// applied to (|dd> +- |uu>)/sqrt(2) (x) |n_c, n_r>.
std::array<cplx, 4> closed_form_carrier(BellSign sign, const CarrierParams& p, int n_c, int n_r,
                                        double t0);

/// Carrier pulse on an arbitrary electronic input inside one Fock block:
/// each ion rotates independently.
std::array<cplx, 4> carrier_block(const CarrierParams& p, int n_c, int n_r, double t0,
                                  const std::array<cplx, 4>& in);

/// Validity warnings: stretch-mode co-resonance for k not in {0, 1}, delta too
/// small for the dispersive regime, delta too large for the rotating-wave step.
std::vector<std::string> resonance_guard(const BichromaticParams& p, double tolerance = -1.0);

/// Largest eta^k |Omega| |f_k| over the grid.
double max_vibronic_rabi(const BichromaticParams& p, int n_c_max, int n_r_max);

}  // namespace vibronic
