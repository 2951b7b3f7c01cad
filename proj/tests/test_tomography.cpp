#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vibronic/nnls.hpp"
#include "vibronic/record_io.hpp"
#include "vibronic/tomography.hpp"

using namespace vibronic;

namespace {

constexpr double kPi = std::numbers::pi;

BichromaticParams drive() {
  BichromaticParams p;
  p.delta = p.delta_prime = 0.1;
  p.omega = 0.05;
  p.modes = ModeParams::from_eta(0.23);
  return p;
}

/// Exhaustive NNLS: best feasible unconstrained fit over every support set.
Eigen::VectorXd nnls_brute(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.cols());
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  double best_r = b.norm();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) idx.push_back(j);
    Eigen::MatrixXd sub(a.rows(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) sub.col(j) = a.col(idx[j]);
    const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
    if ((z.array() < 0.0).any()) continue;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t j = 0; j < idx.size(); ++j) x[idx[j]] = z[j];
    const double r = (a * x - b).norm();
    if (r < best_r) {
      best_r = r;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("nnls matches exhaustive search") {
  std::mt19937_64 g(5);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::MatrixXd a(9, 5);
    Eigen::VectorXd b(9);
    for (auto& v : a.reshaped()) v = gauss(g);
    for (auto& v : b) v = gauss(g);
    const NnlsResult r = nnls(a, b);
    CHECK(r.converged);
    CHECK((r.x.array() >= 0.0).all());
    CHECK((r.x - nnls_brute(a, b)).norm() < 1e-10);
    CHECK(r.residual_norm == doctest::Approx((a * r.x - b).norm()).epsilon(1e-12));
  }
}

TEST_CASE("seed streams") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("noiseless signal of a Fock state is a single cos^2") {
  const HilbertConfig cfg{6, 2};
  const BichromaticParams p = drive();
  const VibDensity rho = make_vib_state(FockSpec{3, 1}, cfg);
  const std::vector<double> taus{0.0, 10.0, 250.0, 1234.5};
  const SignalRecord rec = synth_signal(rho, taus, p, 0, 0);
  const double w = rabi_effective(3, 1, p);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double c = std::cos(w * taus[i]);
    CHECK(rec.samples[i].p_dd == doctest::Approx(c * c).epsilon(1e-14));
    CHECK(rec.samples[i].shots == 0);
  }
}

TEST_CASE("shot noise is seeded and binomial") {
  const HilbertConfig cfg{6, 0};
  const BichromaticParams p = drive();
  const VibDensity rho = make_vib_state(FockSpec{0, 0}, cfg);
  const double w = rabi_effective(0, 0, p);
  const double tau = 0.3 * kPi / w;
  std::vector<double> taus;
  for (int i = 0; i < 400; ++i) taus.push_back(tau + i * kPi / w);  // same probability every sample
  const double prob = std::pow(std::cos(w * tau), 2);
  const SignalRecord a = synth_signal(rho, taus, p, 1000, 42);
  const SignalRecord b = synth_signal(rho, taus, p, 1000, 42);
  const SignalRecord c = synth_signal(rho, taus, p, 1000, 43);
  double mean = 0.0, var = 0.0;
  bool differs = false;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK(a.samples[i].p_dd == b.samples[i].p_dd);
    differs |= a.samples[i].p_dd != c.samples[i].p_dd;
    mean += a.samples[i].p_dd;
  }
  mean /= taus.size();
  for (const auto& s : a.samples) var += (s.p_dd - mean) * (s.p_dd - mean);
  var /= taus.size() - 1;
  CHECK(differs);
  const double sigma = std::sqrt(prob * (1.0 - prob) / 1000.0);
  CHECK(std::abs(mean - prob) < 5.0 * sigma / std::sqrt(400.0));
  CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.25));
}

TEST_CASE("inversion recovers exact populations") {
  const HilbertConfig cfg{12, 2};
  const BichromaticParams p = drive();
  const VibDensity rho = make_vib_state(ThermalSpec{0.6, 0.0}, cfg);
  const std::vector<double> taus = default_tau_grid(p, 10, 0);
  const SignalRecord rec = synth_signal(rho, taus, p, 0, 0);
  const PopulationEstimate est = invert_populations(rec, 10, 0);
  for (int n = 0; n <= 10; ++n) CHECK(std::abs(est.at(n, 0) - rho.population(n, 0)) < 1e-4);
  CHECK(est.total() <= 1.0 + 1e-12);
  CHECK(est.condition_number < kConditionThreshold);
}

TEST_CASE("degenerate designs are reported") {
  BichromaticParams p = drive();
  p.k = p.k_prime = 0;
  const ConditionReport rep = condition_report(p, 4, 0, std::vector<double>{0.0, 1.0, 2.0});
  CHECK_FALSE(rep.resolved);
  CHECK_THROWS_AS(tau_grid(p, 4, 0, 20), DegenerateDesign);

  SignalRecord rec;
  rec.params = drive();
  for (int i = 0; i < 5; ++i) rec.samples.push_back({i * 1e-9, 1.0, 0});
  CHECK_THROWS_AS(invert_populations(rec, 4, 0), DegenerateDesign);

  const ConditionReport ok = condition_report(drive(), 10, 0, default_tau_grid(drive(), 10, 0));
  CHECK(ok.resolved);
  CHECK(ok.recommended_tau_span == doctest::Approx(kPi / ok.min_gap));
}

TEST_CASE("Wigner function oracles") {
  const HilbertConfig cfg{24, 2};
  const double s = wigner_scale();
  CHECK(s == doctest::Approx(4.0 / (kPi * kPi)));
  CHECK(wigner_direct(make_vib_state(FockSpec{1, 0}, cfg), 0.0, 0.0) == doctest::Approx(-s).epsilon(1e-12));
  const cplx beta{0.4, -0.3};
  const VibDensity coh = make_vib_state(CoherentSpec{beta, 0.0}, cfg);
  for (const cplx a : {cplx{0.0, 0.0}, cplx{0.4, -0.3}, cplx{-0.5, 0.2}})
    CHECK(wigner_direct(coh, a, 0.0) == doctest::Approx(s * std::exp(-2.0 * std::norm(a - beta))).epsilon(1e-10));
  // Parity sum on displaced populations from the analytic displacement elements.
  const cplx a{0.6, 0.1};
  double w = 0.0;
  for (int n = 0; n <= 24; ++n) w += (n % 2 ? -1.0 : 1.0) * std::norm(oracle::displacement_element(n, 1, -a));
  CHECK(wigner_direct(make_vib_state(FockSpec{1, 0}, cfg), a, 0.0) == doctest::Approx(s * w).epsilon(1e-10));
}

TEST_CASE("protocol is independent of the thread count") {
  const HilbertConfig cfg{14, 2};
  const BichromaticParams p = drive();
  const VibDensity rho = make_vib_state(SuperpositionSpec{{{0, 0, 1.0}, {2, 0, 1.0}}}, cfg);
  const std::vector<std::pair<cplx, cplx>> alphas{{-0.5, 0.0}, {0.0, 0.0}, {0.3, 0.2}, {0.5, 0.0}};
  ProtocolOptions o;
  o.n_fit_c = 8;
  const auto taus = tau_grid(p, 8, 0, 50);
  const auto one = protocol_run(rho, alphas, taus, p, 5000, 9, o);
  o.threads = 3;
  const auto three = protocol_run(rho, alphas, taus, p, 5000, 9, o);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    CHECK(one[i].point.w == three[i].point.w);
    CHECK(one[i].estimate.pi == three[i].estimate.pi);
  }
  o.n_fit_c = 13;
  CHECK_THROWS_AS(protocol_run(rho, alphas, taus, p, 0, 0, o), Error);
}

TEST_CASE("record text round trip") {
  BichromaticParams p = drive();
  p.omega = {0.03, -0.01};
  p.phi = 0.123456789012345;
  const VibDensity rho = make_vib_state(FockSpec{1, 0}, HilbertConfig{4, 0});
  const SignalRecord rec = synth_signal(rho, std::vector<double>{0.0, 1.0 / 3.0, 77.7}, p, 100, 8);
  std::stringstream ss;
  io::write_record(ss, rec);
  const std::string text = ss.str();
  CHECK(text.find("# record.seed = 8") != std::string::npos);
  const SignalRecord back = io::read_record(ss);
  CHECK(back.seed == 8);
  CHECK(back.params.omega == p.omega);
  CHECK(back.params.phi == p.phi);
  REQUIRE(back.samples.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.samples[i].tau == rec.samples[i].tau);
    CHECK(back.samples[i].p_dd == rec.samples[i].p_dd);
    CHECK(back.samples[i].shots == 100);
  }
  std::stringstream bad("# record.k = 1\n0,0.5\n");
  CHECK_THROWS_AS(io::read_record(bad), io::IoError);
}
