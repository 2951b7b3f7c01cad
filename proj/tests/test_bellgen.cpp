#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vibronic/bellgen.hpp"

using namespace vibronic;

namespace {

constexpr double kPi = std::numbers::pi;

BichromaticParams drive(int k) {
  BichromaticParams p;
  p.k = p.k_prime = k;
  p.delta = p.delta_prime = 0.1;
  p.omega = 0.05;
  p.modes = ModeParams::from_eta(0.1);
  return p;
}

CarrierParams carrier(double varphi0) {
  CarrierParams c;
  c.omega = 0.02;
  c.varphi0 = varphi0;
  c.modes = ModeParams::from_eta(0.1);
  return c;
}

}  // namespace

TEST_CASE("Phi pulses at pi/4 and 3 pi/4 of the effective Rabi frequency") {
  const HilbertConfig cfg{5, 3};
  for (const int k : {1, 2}) {
    const BichromaticParams p = drive(k);
    const double w = std::abs(rabi_effective(1, 2, p));
    const BellResult plus = make_phi(BellSign::plus, p, cfg, {1, 2}, Engine::effective);
    const BellResult minus = make_phi(BellSign::minus, p, cfg, {1, 2}, Engine::effective);
    CHECK(plus.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(minus.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    const double a = plus.sequence.total_duration(), b = minus.sequence.total_duration();
    CHECK(std::min(a, b) == doctest::Approx(kPi / (4.0 * w)).epsilon(1e-14));
    CHECK(std::max(a, b) == doctest::Approx(3.0 * kPi / (4.0 * w)).epsilon(1e-14));
    CHECK(fidelity(plus.state, minus.state) < 1e-20);
  }
  // k = 1: Phi(+) comes first.
  const BichromaticParams p = drive(1);
  CHECK(phi_pulse_time(BellSign::plus, p, {0, 0}) < phi_pulse_time(BellSign::minus, p, {0, 0}));
  CHECK_THROWS_AS(phi_pulse_time(BellSign::plus, drive(0), {0, 0}), SingularParameter);
}

TEST_CASE("Phi target phase") {
  BichromaticParams p = drive(1);
  p.phi = 0.25;
  const auto e = BellTarget::phi_state(BellSign::plus, p).electronic();
  // (|dd> + i (-1)^k e^{2 i phi} |uu>) / sqrt(2) with k = 1
  CHECK(std::abs(e[3] - cplx{0.0, -1.0} * std::exp(cplx{0.0, 0.5}) / std::numbers::sqrt2) < 1e-15);
  const HilbertConfig cfg{3, 1};
  const BellResult r = make_phi(BellSign::plus, p, cfg, {0, 0}, Engine::effective);
  CHECK(r.fidelity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phase-shifted pulse gives the other Phi state") {
  const HilbertConfig cfg{3, 1};
  const BichromaticParams p = drive(1);
  const PulseSequence seq = phase_alternative_phi(p, {0, 0});
  const JointState out = apply_sequence(seq, cfg, JointState::basis(cfg, Electronic::dd, 0, 0), Engine::effective);
  const JointState target = BellTarget::phi_state(BellSign::minus, p).joint(cfg, {0, 0});
  CHECK(fidelity(out, target) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Psi states from either Phi state") {
  const HilbertConfig cfg{4, 2};
  for (const double phi0 : {0.0, 0.7, -2.1}) {
    for (const BellSign start : {BellSign::plus, BellSign::minus}) {
      const BellResult a = make_psi(start, drive(1), carrier(phi0), cfg, {2, 1}, Engine::effective);
      const BellResult b = make_psi(start, drive(1), carrier(phi0 + kPi), cfg, {2, 1}, Engine::effective);
      CHECK(a.fidelity == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(b.fidelity == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(fidelity(a.state, b.state) < 1e-20);
      CHECK(a.sequence.pulses.size() == 2);
      CHECK(a.sequence.pulses[1].kind == PulseKind::carrier);
    }
  }
  // At phi0 = 0 the target is (|ud> + |du>) / sqrt(2); in general the relative
  // phase of |du> against |ud> is exp(-i phi0).
  const auto e0 = BellTarget::psi_state(BellSign::plus, carrier(0.0)).electronic();
  CHECK(std::abs(e0[1] - e0[2]) < 1e-16);
  const auto e1 = BellTarget::psi_state(BellSign::plus, carrier(0.7)).electronic();
  CHECK(std::abs(e1[1] / e1[2] - std::exp(cplx{0.0, -0.7})) < 1e-15);
}

TEST_CASE("exact engine approaches the effective result for large detuning") {
  const HilbertConfig cfg{6, 2};
  BichromaticParams p = drive(1);
  p.omega = 0.02;
  Diagnostics diag;
  const BellResult r = make_phi(BellSign::plus, p, cfg, {0, 0}, Engine::exact, &diag);
  CHECK(r.fidelity > 0.99);
  CHECK(r.state.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("thermal scan") {
  const HilbertConfig cfg{16, 16};
  BichromaticParams p = drive(1);
  CHECK(thermal_bell_scan(0.0, 0.0, p, cfg) == doctest::Approx(1.0).epsilon(1e-12));
  p.modes = ModeParams::from_eta(0.23);
  const double f1 = thermal_bell_scan(0.2, 0.2, p, cfg);
  const double f2 = thermal_bell_scan(1.0, 1.0, p, cfg);
  CHECK(f1 < 1.0);
  CHECK(f2 < f1);
}
