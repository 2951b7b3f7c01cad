#pragma once
// Pulse protocols producing the four electronic Bell states: a dispersive
// two-tone pulse for the Phi pair, followed by a carrier pulse for the Psi pair.

#include <variant>
#include <vector>

#include "vibronic/dynamics.hpp"

namespace vibronic {

enum class BellFamily { phi, psi };
enum class Engine { effective, exact };

/// Target Bell state with the phase convention of the pulses that make it.
///   Phi(+-) = (|dd> +- i (-1)^k e^{2 i phi} |uu>) / sqrt(2)
///   Psi(+)  = (e^{i phi0/2} |ud> + e^{-i phi0/2} |du>) / sqrt(2)
///   Psi(-)  = Psi(+) with phi0 -> phi0 + pi
/// phi is the effective dispersive phase (laser phase plus arg Omega); phi0 is
/// the carrier's q0 d.
struct BellTarget {
  BellFamily family = BellFamily::phi;
  BellSign sign = BellSign::plus;
  int k = 1;
  double phi = 0.0;
  double phi0 = 0.0;

  static BellTarget phi_state(BellSign sign, const BichromaticParams& p);
  static BellTarget psi_state(BellSign sign, const CarrierParams& pc);

  std::array<cplx, 4> electronic() const;
  JointState joint(const HilbertConfig& cfg, const FockSpec& vib) const;
};

enum class PulseKind { dispersive, carrier };

struct Pulse {
  PulseKind kind = PulseKind::dispersive;
  std::variant<BichromaticParams, CarrierParams> params;
  double duration = 0.0;
  /// Fock-dependent prefactor exp(-i (-1)^k W t) of the addressed block for a
  /// dispersive pulse; 1 for a carrier pulse.
  cplx block_phase{1.0, 0.0};
};

struct PulseSequence {
  std::vector<Pulse> pulses;
  double total_duration() const;
};

struct BellResult {
  JointState state;
  double fidelity = 0.0;
  PulseSequence sequence;
  BellTarget target;
};

/// Applies the pulses in order. The effective engine uses the dispersive
/// effective Hamiltonian; the exact engine integrates the full two-tone
/// Hamiltonian. Carrier pulses are exact in both.
JointState apply_sequence(const PulseSequence& seq, const HilbertConfig& cfg,
                          const JointState& psi0, Engine engine, Diagnostics* diag = nullptr);

/// Duration of the dispersive pulse that maps |dd> (x) |vib> onto Phi(sign):
/// pi / (4|W|) or 3 pi / (4|W|). Throws SingularParameter when W = 0.
double phi_pulse_time(BellSign sign, const BichromaticParams& p, const FockSpec& vib);

BellResult make_phi(BellSign sign, const BichromaticParams& p, const HilbertConfig& cfg,
                    const FockSpec& vib, Engine engine, Diagnostics* diag = nullptr);

/// Same t+ pulse with phi shifted by pi/2; produces the other Phi state of the
/// original phase convention.
PulseSequence phase_alternative_phi(const BichromaticParams& p, const FockSpec& vib);

/// Carrier laser phase that turns Phi(start) into the Psi state. Reduces to
/// 0 (Phi+) or pi/2 (Phi-) when i (-1)^k e^{2 i phi} = 1 and Omega_0 > 0.
double psi_carrier_phase(BellSign start, const BichromaticParams& pd, const CarrierParams& pc,
                         const FockSpec& vib);

/// Dispersive pulse to Phi(start), then a carrier pulse of t0 = pi / (4|Omega_0|)
/// with the phase from psi_carrier_phase. The result targets Psi(+) for
/// pc.varphi0; pass varphi0 + pi for the orthogonal partner. pc.varphi is
/// replaced by the protocol phase.
BellResult make_psi(BellSign start, const BichromaticParams& pd, const CarrierParams& pc,
                    const HilbertConfig& cfg, const FockSpec& vib, Engine engine,
                    Diagnostics* diag = nullptr);

/// Fidelity of the reduced electronic state with Phi(+) after a dispersive
/// pulse acting on |dd><dd| (x) thermal(nbar_c, nbar_r), evaluated block by
/// block. t_pulse <= 0 selects the (0,0) Phi(+) pulse time.
double thermal_bell_scan(double nbar_c, double nbar_r, const BichromaticParams& p,
                         const HilbertConfig& cfg, double t_pulse = -1.0,
                         Diagnostics* diag = nullptr);

}  // namespace vibronic
