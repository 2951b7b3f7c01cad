#pragma once
// Independent reference formulas for the tests. Written from the closed-form
// textbook expressions, not from the library code paths.

#include <cmath>
#include <complex>

namespace oracle {

inline double factorial(int n) { return std::tgamma(n + 1.0); }

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// L_n^k(x) = sum_m (-1)^m C(n+k, n-m) x^m / m!
inline double laguerre(int n, int k, double x) {
  double s = 0.0;
  for (int m = 0; m <= n; ++m) s += (m % 2 ? -1.0 : 1.0) * binomial(n + k, n - m) * std::pow(x, m) / factorial(m);
  return s;
}

/// <m| exp(alpha a^dag - conj(alpha) a) |n> on the untruncated oscillator.
inline std::complex<double> displacement_element(int m, int n, std::complex<double> alpha) {
  const double x = std::norm(alpha);
  const double g = std::exp(-0.5 * x);
  if (m >= n)
    return std::sqrt(factorial(n) / factorial(m)) * std::pow(alpha, m - n) * g * laguerre(n, m - n, x);
  return std::sqrt(factorial(m) / factorial(n)) * std::pow(-std::conj(alpha), n - m) * g * laguerre(m, n - m, x);
}

inline double poisson(int n, double mean) { return std::exp(-mean + n * std::log(mean) - std::lgamma(n + 1.0)); }

/// Thermal occupation probability (untruncated).
inline double geometric(int n, double nbar) { return std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1); }

/// exp(-(eta^2 + eta_r^2)/2) n!/(n+k)! L_n^k(eta^2) L_m^0(eta_r^2)
inline double coupling_f(int n_c, int n_r, int k, double eta, double eta_r) {
  return std::exp(-0.5 * (eta * eta + eta_r * eta_r)) * factorial(n_c) / factorial(n_c + k) *
         laguerre(n_c, k, eta * eta) * laguerre(n_r, 0, eta_r * eta_r);
}

}  // namespace oracle
