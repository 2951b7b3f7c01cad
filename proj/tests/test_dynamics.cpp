#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vibronic/dynamics.hpp"

using namespace vibronic;

namespace {

BichromaticParams drive(int k, double eta, double delta = 0.1, cplx omega = 0.05) {
  BichromaticParams p;
  p.k = p.k_prime = k;
  p.delta = p.delta_prime = delta;
  p.omega = omega;
  p.modes = ModeParams::from_eta(eta);
  return p;
}

bool hermitian(const CMatrix& h) { return (h - h.adjoint()).norm() <= 1e-13 * std::max(1.0, h.norm()); }

}  // namespace

TEST_CASE("effective Rabi frequency") {
  CHECK_THROWS_AS(omega_k_scale(1, 0.05, 0.0, 0.1), SingularParameter);
  CHECK(omega_k_scale(1, 0.05, 0.1, 0.1) < 0.0);
  CHECK(omega_k_scale(2, 0.05, 0.1, 0.1) > 0.0);

  const BichromaticParams p = drive(1, 0.23);
  // k = 1, n_c = 0: W = 2 |Omega|^2 eta^2 f^2 / delta
  const double f = oracle::coupling_f(0, 0, 1, 0.23, p.modes.eta_r);
  CHECK(rabi_effective(0, 0, p) == doctest::Approx(2.0 * 0.0025 * 0.0529 * f * f / 0.1).epsilon(1e-12));
  // General n: Omega_k f^2 [n!/(n-k)! - (n+k)!/n!] with the series oracle.
  for (int n = 0; n <= 10; ++n) {
    const double fn = oracle::coupling_f(n, 2, 1, 0.23, p.modes.eta_r);
    const double expect = -2.0 * 0.0025 * 0.0529 / 0.1 * fn * fn * (n - (n + 1.0));
    CHECK(rabi_effective(n, 2, p) == doctest::Approx(expect).epsilon(1e-11));
  }
  CHECK(rabi_effective(3, 1, drive(0, 0.23)) == 0.0);
  CHECK(rabi_effective(0, 0, drive(1, 0.23, -0.1)) < 0.0);
  const RabiSpectrum s = rabi_spectrum(p, 3, 2);
  CHECK(s.values.size() == 12);
  CHECK(s.at(2, 1) == rabi_effective(2, 1, p));
}

TEST_CASE("two-tone Hamiltonian") {
  const HilbertConfig cfg{5, 2};
  const BichromaticParams p = drive(1, 0.2);
  const CMatrix h0 = build_bichromatic_H(0.0, p, cfg);
  CHECK(hermitian(h0));
  CHECK(hermitian(build_bichromatic_H(13.7, p, cfg)));
  // H(t) = R(t) H(0) R(t)^dagger with R(t) = exp(i delta t n_c)
  const double t = 21.3;
  const ModeOperators ops = mode_operators(cfg);
  const CVector phases = (cplx{0.0, p.delta * t} * ops.n_c.diagonal()).array().exp();
  const CMatrix rotated = phases.asDiagonal() * h0 * phases.conjugate().asDiagonal();
  CHECK((rotated - build_bichromatic_H(t, p, cfg)).norm() < 1e-13);
}

TEST_CASE("effective Hamiltonian couples dd to uu and du to ud only") {
  const HilbertConfig cfg{4, 2};
  BichromaticParams p = drive(2, 0.15);
  p.phi = 0.4;
  p.phi0 = -1.2;
  const CMatrix h = build_effective_H(p, cfg);
  CHECK(hermitian(h));
  for (int i = 0; i < cfg.dim(); ++i)
    for (int j = 0; j < cfg.dim(); ++j) {
      if (std::abs(h(i, j)) == 0.0) continue;
      const int ei = i / cfg.vib_dim(), ej = j / cfg.vib_dim();
      CHECK(i % cfg.vib_dim() == j % cfg.vib_dim());
      CHECK((ei == ej || ei + ej == 3));
    }
  Diagnostics diag;
  build_effective_H(drive(1, 0.1, 1e-4), cfg, &diag);
  CHECK(!diag.empty());
}

TEST_CASE("propagators") {
  const HilbertConfig cfg{3, 1};
  const JointState psi0 = JointState::basis(cfg, Electronic::dd, 1, 0);

  SUBCASE("non-Hermitian input is rejected") {
    CMatrix h = CMatrix::Zero(cfg.dim(), cfg.dim());
    h(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianPropagator{h}, NumericalError);
  }

  SUBCASE("time stepper reproduces a constant Hamiltonian") {
    const CMatrix h = build_effective_H(drive(1, 0.2), cfg);
    TimeDepOptions o;
    o.dt_max = 5.0;
    const TimeDepResult r = propagate_timedep([&](double) { return h; }, psi0, 300.0, o);
    CHECK((r.state.amplitudes - propagate_const(h, psi0, 300.0).amplitudes).norm() < 1e-12);
  }

  SUBCASE("exact two-tone evolution agrees with the midpoint stepper") {
    const BichromaticParams p = drive(1, 0.2);
    const BichromaticEvolution ev(p, cfg);
    TimeDepOptions o;
    o.dt_max = 0.01;
    o.check_halving = true;
    const TimeDepResult mid = ev.midpoint(psi0, 40.0, o);
    CHECK((mid.state.amplitudes - ev.exact(psi0, 40.0).amplitudes).norm() < 1e-6);
    CHECK(mid.halving_change >= 0.0);
    CHECK(mid.halving_change < 1e-6);
    // Same route through the generic stepper.
    const TimeDepResult gen = propagate_timedep([&](double t) { return build_bichromatic_H(t, p, cfg); }, psi0, 40.0, o);
    CHECK((gen.state.amplitudes - mid.state.amplitudes).norm() < 1e-8);
  }
}

TEST_CASE("dispersive closed form") {
  const HilbertConfig cfg{6, 3};
  BichromaticParams p = drive(1, 0.2);
  p.omega = std::polar(0.04, 0.9);
  p.phi = -0.3;
  for (const int n : {0, 3, 6}) {
    const double w = rabi_effective(n, 1, p);
    const double t = 0.37 * std::numbers::pi / std::abs(w);
    const auto amps = closed_form_dispersive(n, 1, p, t);
    const cplx g = std::exp(cplx{0.0, w * t});  // -(-1)^k W t with k = 1
    CHECK(std::abs(amps[0] - g * std::cos(w * t)) < 1e-14);
    const cplx e2 = std::exp(cplx{0.0, 2.0 * effective_phi(p)});
    CHECK(std::abs(amps[1] - g * cplx{0.0, -1.0} * e2 * std::sin(w * t)) < 1e-14);
    const JointState out = propagate_const(build_effective_H(p, cfg), JointState::basis(cfg, Electronic::dd, n, 1), t);
    CHECK(std::abs(out.amplitude(Electronic::dd, n, 1) - amps[0]) < 1e-12);
    CHECK(std::abs(out.amplitude(Electronic::uu, n, 1) - amps[1]) < 1e-12);
  }
}

TEST_CASE("carrier") {
  const HilbertConfig cfg{4, 2};
  CarrierParams c;
  c.omega = std::polar(0.03, 0.5);
  c.varphi = 0.2;
  c.varphi0 = 1.3;
  c.modes = ModeParams::from_eta(0.2);
  const CMatrix h = build_carrier_H(c, cfg);
  CHECK(hermitian(h));
  // Each Fock block has spectrum {0, 0, +-2 |Omega_0|}.
  const HermitianPropagator prop(h);
  const double f0 = oracle::coupling_f(2, 1, 0, 0.2, c.modes.eta_r);
  int zeros = 0, plus = 0, minus = 0;
  for (double e : prop.eigenvalues()) {
    zeros += std::abs(e) < 1e-13;
    plus += std::abs(e - 2.0 * 0.03 * std::abs(f0)) < 1e-13;
    minus += std::abs(e + 2.0 * 0.03 * std::abs(f0)) < 1e-13;
  }
  CHECK(zeros >= 2 * cfg.vib_dim());
  CHECK(plus >= 1);
  CHECK(minus >= 1);

  const double r = 1.0 / std::numbers::sqrt2;
  for (const BellSign s : {BellSign::plus, BellSign::minus}) {
    const std::array<cplx, 4> in{r, 0.0, 0.0, s == BellSign::plus ? r : -r};
    const auto a = closed_form_carrier(s, c, 2, 1, 17.0);
    const auto b = carrier_block(c, 2, 1, 17.0, in);
    for (int e = 0; e < 4; ++e) CHECK(std::abs(a[e] - b[e]) < 1e-14);
  }
}

TEST_CASE("resonance guard") {
  BichromaticParams p = drive(2, 0.1, 2.0 - std::sqrt(3.0), 0.01);
  bool coresonance = false;
  for (const auto& w : resonance_guard(p)) coresonance |= w.find("stretch") != std::string::npos;
  CHECK(coresonance);
  for (const auto& w : resonance_guard(drive(1, 0.1, 0.1, 0.01))) CHECK(w.find("stretch") == std::string::npos);
  CHECK(!resonance_guard(drive(1, 0.1, 0.5, 0.01)).empty());
  CHECK(!resonance_guard(drive(1, 0.1, 1e-4, 0.05)).empty());
  CHECK(resonance_guard(drive(1, 0.1, 0.1, 0.05)).empty());
}
