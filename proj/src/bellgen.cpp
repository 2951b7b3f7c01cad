#include "vibronic/bellgen.hpp"

#include <cmath>
#include <numbers>

namespace vibronic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

double minus_one_pow(int k) { return (k & 1) ? -1.0 : 1.0; }

// i (-1)^k e^{2 i phi}: relative |uu>/|dd> phase of Phi(+).
cplx phi_phase(int k, double phi) { return kI * minus_one_pow(k) * std::polar(1.0, 2.0 * phi); }

JointState vib_product(const HilbertConfig& cfg, const std::array<cplx, 4>& el, const FockSpec& vib) {
  return JointState::product(cfg, el, make_vib_vector(vib, cfg));
}

}  // namespace

BellTarget BellTarget::phi_state(BellSign sign, const BichromaticParams& p) {
  return {BellFamily::phi, sign, p.k, effective_phi(p), p.phi0};
}

BellTarget BellTarget::psi_state(BellSign sign, const CarrierParams& pc) {
  return {BellFamily::psi, sign, 0, pc.varphi, pc.varphi0};
}

std::array<cplx, 4> BellTarget::electronic() const {
  const double r = 1.0 / std::numbers::sqrt2;
  const double pm = sign == BellSign::plus ? 1.0 : -1.0;
  if (family == BellFamily::phi) return {r, 0.0, 0.0, r * pm * phi_phase(k, phi)};
  const double p0 = sign == BellSign::plus ? phi0 : phi0 + kPi;
  return {0.0, r * std::polar(1.0, -0.5 * p0), r * std::polar(1.0, 0.5 * p0), 0.0};
}

JointState BellTarget::joint(const HilbertConfig& cfg, const FockSpec& vib) const {
  return vib_product(cfg, electronic(), vib);
}

double PulseSequence::total_duration() const {
  double t = 0.0;
  for (const Pulse& p : pulses) t += p.duration;
  return t;
}

JointState apply_sequence(const PulseSequence& seq, const HilbertConfig& cfg,
                          const JointState& psi0, Engine engine, Diagnostics* diag) {
  JointState psi = psi0;
  for (const Pulse& pulse : seq.pulses) {
    if (!(pulse.duration > 0.0)) throw Error("pulse durations must be > 0");
    if (pulse.kind == PulseKind::carrier) {
      psi = propagate_const(build_carrier_H(std::get<CarrierParams>(pulse.params), cfg), psi,
                            pulse.duration);
      continue;
    }
    const auto& p = std::get<BichromaticParams>(pulse.params);
    if (engine == Engine::effective) {
      psi = propagate_const(build_effective_H(p, cfg, diag), psi, pulse.duration);
    } else {
      for (const std::string& w : resonance_guard(p)) warn(diag, w);
      psi = BichromaticEvolution(p, cfg).exact(psi, pulse.duration);
      check_truncation(psi, diag);
    }
  }
  return psi;
}

double phi_pulse_time(BellSign sign, const BichromaticParams& p, const FockSpec& vib) {
  const double w = rabi_effective(vib.n_c, vib.n_r, p);
  if (w == 0.0)
    throw SingularParameter("effective Rabi frequency vanishes; the Phi pulse time is infinite");
  // |uu>/|dd> = -i e^{2i phi} tan(W t), so Phi(+) needs tan(|W| t) = sigma with
  // sigma = (-1)^(k+1) sign(W)  (+1 for delta > 0).
  const double sigma = -minus_one_pow(p.k) * (w > 0.0 ? 1.0 : -1.0);
  const double want = (sign == BellSign::plus ? 1.0 : -1.0) * sigma;
  return (want > 0.0 ? kPi : 3.0 * kPi) / (4.0 * std::abs(w));
}

namespace {

Pulse dispersive_pulse(const BichromaticParams& p, const FockSpec& vib, double t) {
  const double w = rabi_effective(vib.n_c, vib.n_r, p);
  return {PulseKind::dispersive, p, t, std::polar(1.0, -minus_one_pow(p.k) * w * t)};
}

}  // namespace

BellResult make_phi(BellSign sign, const BichromaticParams& p, const HilbertConfig& cfg,
                    const FockSpec& vib, Engine engine, Diagnostics* diag) {
  const double t = phi_pulse_time(sign, p, vib);
  PulseSequence seq{{dispersive_pulse(p, vib, t)}};
  const JointState psi0 = vib_product(cfg, {1.0, 0.0, 0.0, 0.0}, vib);
  BellResult out{apply_sequence(seq, cfg, psi0, engine, diag), 0.0, seq,
                 BellTarget::phi_state(sign, p)};
  out.fidelity = fidelity(out.state, out.target.joint(cfg, vib));
  return out;
}

PulseSequence phase_alternative_phi(const BichromaticParams& p, const FockSpec& vib) {
  BichromaticParams shifted = p;
  shifted.phi += 0.5 * kPi;
  return {{dispersive_pulse(shifted, vib, phi_pulse_time(BellSign::plus, p, vib))}};
}

double psi_carrier_phase(BellSign start, const BichromaticParams& pd, const CarrierParams& pc,
                         const FockSpec& vib) {
  // Zero |dd>, |uu> weight at |Omega_0| t0 = pi/4 requires e^{2 i phi_eff} to equal
  // the Phi input's relative phase +-gamma.
  const cplx gamma = phi_phase(pd.k, effective_phi(pd));
  const cplx omega0 = pc.omega * coupling_f(vib.n_c, vib.n_r, 0, pc.modes);
  double phase = 0.5 * std::arg(gamma) - std::arg(omega0);
  if (start == BellSign::minus) phase += 0.5 * kPi;
  return phase;
}

BellResult make_psi(BellSign start, const BichromaticParams& pd, const CarrierParams& pc,
                    const HilbertConfig& cfg, const FockSpec& vib, Engine engine,
                    Diagnostics* diag) {
  CarrierParams carrier = pc;
  carrier.varphi = psi_carrier_phase(start, pd, pc, vib);
  const double omega0 = std::abs(pc.omega * coupling_f(vib.n_c, vib.n_r, 0, pc.modes));
  if (omega0 == 0.0) throw SingularParameter("carrier Rabi frequency vanishes");

  PulseSequence seq{{dispersive_pulse(pd, vib, phi_pulse_time(start, pd, vib)),
                     Pulse{PulseKind::carrier, carrier, kPi / (4.0 * omega0), {1.0, 0.0}}}};
  const JointState psi0 = vib_product(cfg, {1.0, 0.0, 0.0, 0.0}, vib);
  BellResult out{apply_sequence(seq, cfg, psi0, engine, diag), 0.0, seq,
                 BellTarget::psi_state(BellSign::plus, carrier)};
  out.fidelity = fidelity(out.state, out.target.joint(cfg, vib));
  return out;
}

double thermal_bell_scan(double nbar_c, double nbar_r, const BichromaticParams& p,
                         const HilbertConfig& cfg, double t_pulse, Diagnostics* diag) {
  const VibDensity rho = make_vib_state(ThermalSpec{nbar_c, nbar_r}, cfg, diag);
  if (!(t_pulse > 0.0)) t_pulse = phi_pulse_time(BellSign::plus, p, FockSpec{0, 0});
  const std::array<cplx, 4> target = BellTarget::phi_state(BellSign::plus, p).electronic();
  // Blocks are orthogonal in the vibrational index, so the reduced electronic
  // fidelity is the population-weighted block fidelity. Fixed summation order.
  double total = 0.0;
  for (int nc = 0; nc <= cfg.n_max_c; ++nc)
    for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
      const double pop = rho.population(nc, nr);
      if (pop == 0.0) continue;
      const auto amps = closed_form_dispersive(nc, nr, p, t_pulse);
      const cplx overlap = std::conj(target[0]) * amps[0] + std::conj(target[3]) * amps[1];
      total += pop * std::norm(overlap);
    }
  return total;
}

}  // namespace vibronic
