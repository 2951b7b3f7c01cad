#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "vibronic/fockspace.hpp"

using namespace vibronic;

TEST_CASE("basis ordering") {
  const HilbertConfig cfg{2, 1};
  CHECK(cfg.dim() == 24);
  CHECK(cfg.index(Electronic::dd, 0, 0) == 0);
  CHECK(cfg.index(Electronic::dd, 0, 1) == 1);
  CHECK(cfg.index(Electronic::dd, 1, 0) == 2);
  CHECK(cfg.index(Electronic::du, 0, 0) == 6);
  CHECK(cfg.index(Electronic::uu, 2, 1) == 23);
  CHECK_THROWS_AS(HilbertConfig({-1, 0}).validate(), Error);
}

TEST_CASE("Laguerre recurrence matches the explicit series") {
  for (int k = 0; k <= 4; ++k)
    for (int n = 0; n <= 30; ++n)
      for (const double x : {0.0, 0.01, 0.0529, 0.5, 2.0}) {
        const double ref = oracle::laguerre(n, k, x);
        CHECK(laguerre(n, k, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
}

TEST_CASE("factorial ratios") {
  CHECK(falling_factorial(5, 2) == 20.0);
  CHECK(falling_factorial(1, 2) == 0.0);
  CHECK(rising_factorial(3, 2) == 20.0);
  CHECK(rising_factorial(0, 0) == 1.0);
}

TEST_CASE("coupling coefficient") {
  const ModeParams m = ModeParams::from_eta(0.23);
  CHECK(m.eta_r == doctest::Approx(0.23 * std::pow(3.0, -0.25)));
  for (int k = 0; k <= 2; ++k)
    for (int nc = 0; nc <= 20; ++nc)
      for (int nr = 0; nr <= 5; ++nr)
        CHECK(coupling_f(nc, nr, k, m) ==
              doctest::Approx(oracle::coupling_f(nc, nr, k, m.eta, m.eta_r)).epsilon(1e-11).scale(1.0));
  CHECK(coupling_f(3, 2, 1, ModeParams::from_eta(1e-5)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("ladder operators") {
  const HilbertConfig cfg{4, 3};
  const ModeOperators ops = mode_operators(cfg);
  const CMatrix comm = ops.a * ops.a_dag - ops.a_dag * ops.a;
  // Identity except on the top c.m. level, where truncation breaks the algebra.
  for (int e = 0; e < kElectronicDim; ++e)
    for (int nc = 0; nc < cfg.n_max_c; ++nc)
      for (int nr = 0; nr <= cfg.n_max_r; ++nr) {
        const int i = cfg.index(static_cast<Electronic>(e), nc, nr);
        CHECK(std::abs(comm(i, i) - 1.0) < 1e-14);
      }
  CHECK((ops.n_c - ops.a_dag * ops.a).norm() < 1e-14);
  CHECK((ops.n_r - ops.b_dag * ops.b).norm() < 1e-14);
  CHECK((ops.a * ops.b - ops.b * ops.a).norm() < 1e-14);
  const int i = cfg.index(Electronic::ud, 2, 3);
  CHECK(ops.n_c(i, i).real() == doctest::Approx(2.0));
  CHECK(ops.n_r(i, i).real() == doctest::Approx(3.0));
}

TEST_CASE("displacement matches analytic matrix elements away from the cutoff") {
  const HilbertConfig cfg{40, 1};
  for (const cplx alpha : {cplx{0.3, 0.0}, cplx{-0.4, 0.7}, cplx{0.0, -1.0}}) {
    const CMatrix d = displacement(alpha, Mode::c, cfg);
    CHECK((d.adjoint() * d - CMatrix::Identity(d.rows(), d.cols())).norm() < 1e-12);
    for (int m = 0; m <= 6; ++m)
      for (int n = 0; n <= 6; ++n) CHECK(std::abs(d(m, n) - oracle::displacement_element(m, n, alpha)) < 1e-12);
  }
  Diagnostics diag;
  displacement(cplx{2.0, 0.0}, Mode::r, HilbertConfig{10, 8}, &diag);
  CHECK(!diag.empty());
}

TEST_CASE("vibrational states") {
  const HilbertConfig cfg{30, 30};

  SUBCASE("thermal is geometric, renormalized on the grid") {
    const VibDensity rho = make_vib_state(ThermalSpec{0.5, 0.2}, cfg);
    CHECK(check_density(rho).ok());
    double norm = 0.0;
    for (int nc = 0; nc <= 30; ++nc) norm += oracle::geometric(nc, 0.5);
    double norm_r = 0.0;
    for (int nr = 0; nr <= 30; ++nr) norm_r += oracle::geometric(nr, 0.2);
    CHECK(rho.population(2, 1) ==
          doctest::Approx(oracle::geometric(2, 0.5) * oracle::geometric(1, 0.2) / (norm * norm_r)).epsilon(1e-12));
    CHECK_THROWS_AS(make_vib_state(ThermalSpec{-0.1, 0.0}, cfg), Error);
  }

  SUBCASE("coherent populations are Poisson") {
    const cplx ac{0.8, -0.6}, ar{0.3, 0.4};
    const VibDensity rho = make_vib_state(CoherentSpec{ac, ar}, cfg);
    CHECK(check_density(rho).ok());
    for (int nc = 0; nc <= 6; ++nc)
      for (int nr = 0; nr <= 4; ++nr)
        CHECK(rho.population(nc, nr) ==
              doctest::Approx(oracle::poisson(nc, std::norm(ac)) * oracle::poisson(nr, std::norm(ar))).epsilon(1e-10));
  }

  SUBCASE("superposition is renormalized") {
    const CVector v = make_vib_vector(SuperpositionSpec{{{0, 0, 1.0}, {2, 1, cplx{0.0, 1.0}}}}, cfg);
    CHECK(v.norm() == doctest::Approx(1.0));
    CHECK(std::abs(v[cfg.vib_index(2, 1)] - cplx{0.0, 1.0 / std::numbers::sqrt2}) < 1e-15);
    CHECK_THROWS_AS(make_vib_vector(SuperpositionSpec{{{0, 0, 0.0}}}, cfg), Error);
    CHECK_THROWS_AS(make_vib_vector(ThermalSpec{0.1, 0.1}, cfg), Error);
  }
}

TEST_CASE("truncation guard") {
  Diagnostics diag;
  CHECK(check_truncation(make_vib_state(FockSpec{0, 0}, HilbertConfig{6, 6}), &diag));
  CHECK(diag.empty());
  CHECK_FALSE(check_truncation(make_vib_state(CoherentSpec{2.5, 0.0}, HilbertConfig{8, 2}), &diag));
  CHECK(!diag.empty());
}

TEST_CASE("fidelity, reductions and trace distance") {
  const HilbertConfig cfg{3, 2};
  const JointState a = JointState::basis(cfg, Electronic::uu, 1, 2);
  const JointState b = JointState::basis(cfg, Electronic::dd, 1, 2);
  CHECK(fidelity(a, a) == doctest::Approx(1.0));
  CHECK(fidelity(a, b) == 0.0);
  CHECK_THROWS_AS(fidelity(a, JointState::basis(HilbertConfig{2, 2}, Electronic::dd, 0, 0)), DimensionMismatch);

  const double r = 1.0 / std::numbers::sqrt2;
  CVector vib = CVector::Zero(cfg.vib_dim());
  vib[cfg.vib_index(0, 0)] = r;
  vib[cfg.vib_index(3, 1)] = r;
  const JointState psi = JointState::product(cfg, {r, 0.0, 0.0, cplx{0.0, r}}, vib);
  const Eigen::Matrix4cd el = reduce_electronic(psi);
  CHECK(el.trace().real() == doctest::Approx(1.0));
  CHECK(std::abs(el(0, 3) - cplx{0.0, -0.5}) < 1e-15);
  const VibDensity rv = reduce_vibrational(psi);
  CHECK(rv.population(3, 1) == doctest::Approx(0.5));
  CHECK(trace_distance(rv, rv) < 1e-14);
  CHECK(trace_distance(make_vib_state(FockSpec{0, 0}, cfg), make_vib_state(FockSpec{1, 0}, cfg)) ==
        doctest::Approx(1.0));
}
