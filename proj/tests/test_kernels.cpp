#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "vibronic/kernels.hpp"

using vibronic::kernels::cplx;
namespace k = vibronic::kernels;

namespace {

std::vector<double> uniform(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(g);
  return v;
}

std::vector<cplx> complex_uniform(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (cplx& x : v) x = {d(g), d(g)};
  return v;
}

}  // namespace

TEST_CASE("scalar cos2 kernels match the direct formula") {
  std::mt19937_64 g(7);
  const auto freqs = uniform(g, 37, 0.0, 0.02);
  const auto weights = uniform(g, 37, 0.0, 1.0);
  const auto taus = uniform(g, 53, 0.0, 3000.0);
  std::vector<double> sig(taus.size()), design(taus.size() * freqs.size());
  k::scalar_kernels().cos2_signal(freqs, weights, taus, sig);
  k::scalar_kernels().cos2_design(freqs, taus, design);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < freqs.size(); ++j) {
      const double c = std::cos(freqs[j] * taus[i]);
      CHECK(design[i * freqs.size() + j] == doctest::Approx(c * c).epsilon(1e-15));
      s += weights[j] * c * c;
    }
    CHECK(sig[i] == doctest::Approx(s).epsilon(1e-13));
  }
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const k::KernelTable* v = k::avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 variant not available on this host; skipped");
    return;
  }
  const k::KernelTable& s = k::scalar_kernels();
  std::mt19937_64 g(11);

  SUBCASE("cos2 over ordinary, large and odd-length arguments") {
    for (const double span : {10.0, 1e4, 1e7}) {
      for (const std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{29}}) {
        const auto freqs = uniform(g, n, -0.5, 0.5);
        const auto weights = uniform(g, n, 0.0, 1.0);
        const auto taus = uniform(g, 17, 0.0, span);
        std::vector<double> a(taus.size()), b(taus.size());
        s.cos2_signal(freqs, weights, taus, a);
        v->cos2_signal(freqs, weights, taus, b);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-14 * n);
        std::vector<double> da(taus.size() * n), db(taus.size() * n);
        s.cos2_design(freqs, taus, da);
        v->cos2_design(freqs, taus, db);
        for (std::size_t i = 0; i < da.size(); ++i) CHECK(std::abs(da[i] - db[i]) <= 1e-14);
      }
    }
  }

  SUBCASE("complex matvec and dot") {
    for (const std::size_t n : {std::size_t{1}, std::size_t{5}, std::size_t{64}, std::size_t{97}}) {
      const auto m = complex_uniform(g, n * (n + 3));
      const auto x = complex_uniform(g, n + 3);
      std::vector<cplx> ya(n), yb(n);
      s.cmatvec(m, n, n + 3, x, ya);
      v->cmatvec(m, n, n + 3, x, yb);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ya[i] - yb[i]) <= 1e-13);

      const auto a = complex_uniform(g, n), b = complex_uniform(g, n);
      CHECK(std::abs(s.cdot(a, b) - v->cdot(a, b)) <= 1e-13);
    }
  }
}

TEST_CASE("scalar matvec and dot match Eigen") {
  std::mt19937_64 g(3);
  const std::size_t rows = 13, cols = 9;
  const auto m = complex_uniform(g, rows * cols);
  const auto x = complex_uniform(g, cols);
  std::vector<cplx> y(rows);
  k::scalar_kernels().cmatvec(m, rows, cols, x, y);
  const Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> em(m.data(), rows, cols);
  const Eigen::Map<const Eigen::VectorXcd> ex(x.data(), cols);
  const Eigen::VectorXcd ey = em * ex;
  for (std::size_t i = 0; i < rows; ++i) CHECK(std::abs(y[i] - ey[i]) <= 1e-14);

  const Eigen::Map<const Eigen::VectorXcd> ea(m.data(), cols);
  CHECK(std::abs(k::scalar_kernels().cdot({m.data(), cols}, x) - ea.dot(ex)) <= 1e-14);
}

TEST_CASE("active table is one of the two variants") {
  const k::KernelTable& a = k::active();
  CHECK((a.isa == k::Isa::scalar || a.isa == k::Isa::avx2));
  if (!k::cpu_has_avx2()) CHECK(a.isa == k::Isa::scalar);
}
