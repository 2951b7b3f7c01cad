#pragma once
// Data-parallel inner loops used by the propagators and the tomography
// forward model. Every kernel has a portable scalar reference and, on x86-64,
// an AVX2+FMA variant selected once at runtime. The scalar path is the
// numerical reference; the vector path must agree with it to within a few ulp
// of the accumulated sums (see tests/test_kernels.cpp).

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace vibronic::kernels {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

/// Table of kernel entry points for one instruction set.
struct KernelTable {
  Isa isa;
  std::string_view name;

  /// out[i] = sum_j weights[j] * cos^2(freqs[j] * taus[i])
  void (*cos2_signal)(std::span<const double> freqs, std::span<const double> weights,
                      std::span<const double> taus, std::span<double> out);

  /// Row-major design matrix: out[i * freqs.size() + j] = cos^2(freqs[j] * taus[i])
  void (*cos2_design)(std::span<const double> freqs, std::span<const double> taus,
                      std::span<double> out);

  /// y = M x for a row-major rows x cols complex matrix.
  void (*cmatvec)(std::span<const cplx> m, std::size_t rows, std::size_t cols,
                  std::span<const cplx> x, std::span<cplx> y);

  /// sum_i conj(a[i]) * b[i]
  cplx (*cdot)(std::span<const cplx> a, std::span<const cplx> b);
};

const KernelTable& scalar_kernels();

/// nullptr when the build or the host CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// Kernels in use: AVX2 when available unless VIBRONIC_ISA=scalar is set.
const KernelTable& active();

bool cpu_has_avx2();

}  // namespace vibronic::kernels
