#include "vibronic/kernels.hpp"

#include <cmath>

namespace vibronic::kernels {
namespace {

inline double cos2(double x) {
  const double c = std::cos(x);
  return c * c;
}

void cos2_signal(std::span<const double> freqs, std::span<const double> weights,
                 std::span<const double> taus, std::span<double> out) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < freqs.size(); ++j) acc += weights[j] * cos2(freqs[j] * taus[i]);
    out[i] = acc;
  }
}

void cos2_design(std::span<const double> freqs, std::span<const double> taus,
                 std::span<double> out) {
  const std::size_t cols = freqs.size();
  for (std::size_t i = 0; i < taus.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = cos2(freqs[j] * taus[i]);
}

void cmatvec(std::span<const cplx> m, std::size_t rows, std::size_t cols,
             std::span<const cplx> x, std::span<cplx> y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const cplx* row = m.data() + r * cols;
    double re = 0.0, im = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      re += row[c].real() * x[c].real() - row[c].imag() * x[c].imag();
      im += row[c].real() * x[c].imag() + row[c].imag() * x[c].real();
    }
    y[r] = {re, im};
  }
}

cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, "scalar", &cos2_signal, &cos2_design, &cmatvec,
                                 &cdot};
  return table;
}

}  // namespace vibronic::kernels
