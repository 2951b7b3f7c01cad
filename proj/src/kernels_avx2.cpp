// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered through avx2_kernels(), which checks the host CPU.

#include "vibronic/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace vibronic::kernels::detail {
namespace {

// Three-part split of pi/2; each part carries 33 significant bits so that
// n * part is exact for |n| < 2^20.
constexpr double kPio2Hi = 1.57079632673412561417e+00;
constexpr double kPio2Mid = 6.07710050630396597660e-11;
constexpr double kPio2Lo = 2.02226624871116645580e-21;
constexpr double kTwoOverPi = 6.36619772367581382433e-01;
// Beyond this the reduction above loses exactness; those lanes go through libm.
constexpr double kReductionLimit = 1.0e6;

inline __m256d poly6(__m256d z, const double (&c)[6]) {
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 6; ++i) p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(c[i]));
  return p;
}

// cos^2(x) lane-wise. The sign of cos is irrelevant after squaring, so only the
// parity of the quadrant selects between the sine and cosine polynomials.
inline __m256d cos2_pd(__m256d x) {
  static constexpr double kSin[6] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                                     2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                                     8.33333333332211858878e-3,  -1.66666666666666307295e-1};
  static constexpr double kCos[6] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                                     -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                                     -1.38888888888730564116e-3,  4.16666666666665929218e-2};

  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kTwoOverPi)),
                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kPio2Lo), r);
  const __m256d z = _mm256_mul_pd(r, r);

  const __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), poly6(z, kSin), r);
  const __m256d c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), poly6(z, kCos),
                                    _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  const __m128i q = _mm256_cvtpd_epi32(n);
  const __m256i odd = _mm256_cvtepi32_epi64(_mm_and_si128(q, _mm_set1_epi32(1)));
  const __m256d odd_mask = _mm256_castsi256_pd(_mm256_cmpeq_epi64(odd, _mm256_set1_epi64x(1)));
  const __m256d v = _mm256_blendv_pd(c, s, odd_mask);
  __m256d out = _mm256_mul_pd(v, v);

  const __m256d abs_x = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  const int big = _mm256_movemask_pd(_mm256_cmp_pd(abs_x, _mm256_set1_pd(kReductionLimit), _CMP_GT_OQ));
  if (big) {
    alignas(32) double xs[4];
    alignas(32) double os[4];
    _mm256_store_pd(xs, x);
    _mm256_store_pd(os, out);
    for (int l = 0; l < 4; ++l) {
      if (big & (1 << l)) {
        const double cl = std::cos(xs[l]);
        os[l] = cl * cl;
      }
    }
    out = _mm256_load_pd(os);
  }
  return out;
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double cos2_scalar(double x) {
  const double c = std::cos(x);
  return c * c;
}

void cos2_signal(std::span<const double> freqs, std::span<const double> weights,
                 std::span<const double> taus, std::span<double> out) {
  const std::size_t n = freqs.size();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const __m256d tau = _mm256_set1_pd(taus[i]);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n4; j += 4) {
      const __m256d arg = _mm256_mul_pd(_mm256_loadu_pd(freqs.data() + j), tau);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(weights.data() + j), cos2_pd(arg), acc);
    }
    double total = hsum(acc);
    for (std::size_t j = n4; j < n; ++j) total += weights[j] * cos2_scalar(freqs[j] * taus[i]);
    out[i] = total;
  }
}

void cos2_design(std::span<const double> freqs, std::span<const double> taus,
                 std::span<double> out) {
  const std::size_t n = freqs.size();
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const __m256d tau = _mm256_set1_pd(taus[i]);
    double* row = out.data() + i * n;
    for (std::size_t j = 0; j < n4; j += 4)
      _mm256_storeu_pd(row + j, cos2_pd(_mm256_mul_pd(_mm256_loadu_pd(freqs.data() + j), tau)));
    for (std::size_t j = n4; j < n; ++j) row[j] = cos2_scalar(freqs[j] * taus[i]);
  }
}

// Complex products on interleaved (re, im) pairs, two complex numbers per register:
//   m * x = addsub(m * dup_re(x), swap(m) * dup_im(x))
void cmatvec(std::span<const cplx> m, std::size_t rows, std::size_t cols,
             std::span<const cplx> x, std::span<cplx> y) {
  const auto* xd = reinterpret_cast<const double*>(x.data());
  const std::size_t c2 = cols & ~std::size_t{1};
  for (std::size_t r = 0; r < rows; ++r) {
    const auto* row = reinterpret_cast<const double*>(m.data() + r * cols);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    for (std::size_t c = 0; c < c2; c += 2) {
      const __m256d mv = _mm256_loadu_pd(row + 2 * c);
      const __m256d xv = _mm256_loadu_pd(xd + 2 * c);
      acc_re = _mm256_fmadd_pd(mv, _mm256_movedup_pd(xv), acc_re);
      acc_im = _mm256_fmadd_pd(_mm256_permute_pd(mv, 0x5), _mm256_permute_pd(xv, 0xF), acc_im);
    }
    const __m256d v = _mm256_addsub_pd(acc_re, acc_im);
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, v);
    cplx sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
    for (std::size_t c = c2; c < cols; ++c) sum += m[r * cols + c] * x[c];
    y[r] = sum;
  }
}

// conj(a) * b = (ar br + ai bi, ar bi - ai br)
cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
  const auto* ad = reinterpret_cast<const double*>(a.data());
  const auto* bd = reinterpret_cast<const double*>(b.data());
  const std::size_t n2 = a.size() & ~std::size_t{1};
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n2; i += 2) {
    const __m256d av = _mm256_loadu_pd(ad + 2 * i);
    const __m256d bv = _mm256_loadu_pd(bd + 2 * i);
    acc1 = _mm256_fmadd_pd(bv, _mm256_movedup_pd(av), acc1);
    acc2 = _mm256_fmadd_pd(_mm256_permute_pd(bv, 0x5), _mm256_permute_pd(av, 0xF), acc2);
  }
  // even lanes: acc1 + acc2, odd lanes: acc1 - acc2
  const __m256d v = _mm256_addsub_pd(acc1, _mm256_sub_pd(_mm256_setzero_pd(), acc2));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  cplx sum{lanes[0] + lanes[2], lanes[1] + lanes[3]};
  for (std::size_t i = n2; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, "avx2", &cos2_signal, &cos2_design, &cmatvec, &cdot};
  return table;
}

}  // namespace vibronic::kernels::detail
