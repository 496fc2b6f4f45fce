// Compiled with -mavx2 -mfma; only reached through the dispatcher after a CPU
// feature check.

#include <immintrin.h>

#include "bandgap_qed/kernels.hpp"

namespace bgq::kernels::avx2 {
namespace {

// acc_direct += a * re(b) and acc_swapped += swap(a) * im(b), two complex
// numbers per register. addsub(acc_direct, acc_swapped) then holds the
// complex products.
inline void cmul_accumulate(__m256d a, __m256d b, __m256d& acc_direct, __m256d& acc_swapped) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  acc_direct = _mm256_fmadd_pd(a, b_re, acc_direct);
  acc_swapped = _mm256_fmadd_pd(a_swap, b_im, acc_swapped);
}

inline cplx reduce(__m256d acc_direct, __m256d acc_swapped) {
  const __m256d v = _mm256_addsub_pd(acc_direct, acc_swapped);
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

}  // namespace

cplx history_dot(std::span<const cplx> weights, std::span<const cplx> history) noexcept {
  const std::size_t n = weights.size();
  const double* w = reinterpret_cast<const double*>(weights.data());
  const double* h = reinterpret_cast<const double*>(history.data());
  __m256d d0 = _mm256_setzero_pd(), s0 = _mm256_setzero_pd();
  __m256d d1 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t m = 0;
  for (; m + 4 <= n; m += 4) {
    // history[n-1-m], history[n-2-m] come from one reversed 256-bit load.
    const __m256d a0 = _mm256_loadu_pd(w + 2 * m);
    const __m256d a1 = _mm256_loadu_pd(w + 2 * (m + 2));
    const __m256d b0 = _mm256_permute2f128_pd(_mm256_loadu_pd(h + 2 * (n - 2 - m)),
                                              _mm256_loadu_pd(h + 2 * (n - 2 - m)), 0x01);
    const __m256d b1 = _mm256_permute2f128_pd(_mm256_loadu_pd(h + 2 * (n - 4 - m)),
                                              _mm256_loadu_pd(h + 2 * (n - 4 - m)), 0x01);
    cmul_accumulate(a0, b0, d0, s0);
    cmul_accumulate(a1, b1, d1, s1);
  }
  cplx sum = reduce(_mm256_add_pd(d0, d1), _mm256_add_pd(s0, s1));
  for (; m < n; ++m) {
    const cplx a = weights[m];
    const cplx b = history[n - 1 - m];
    sum += cplx(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
  }
  return sum;
}

cplx complex_dot(std::span<const cplx> x, std::span<const cplx> y) noexcept {
  const std::size_t n = x.size();
  const double* xp = reinterpret_cast<const double*>(x.data());
  const double* yp = reinterpret_cast<const double*>(y.data());
  __m256d d0 = _mm256_setzero_pd(), s0 = _mm256_setzero_pd();
  __m256d d1 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    cmul_accumulate(_mm256_loadu_pd(xp + 2 * j), _mm256_loadu_pd(yp + 2 * j), d0, s0);
    cmul_accumulate(_mm256_loadu_pd(xp + 2 * j + 4), _mm256_loadu_pd(yp + 2 * j + 4), d1, s1);
  }
  cplx sum = reduce(_mm256_add_pd(d0, d1), _mm256_add_pd(s0, s1));
  for (; j < n; ++j) {
    sum += cplx(x[j].real() * y[j].real() - x[j].imag() * y[j].imag(),
                x[j].real() * y[j].imag() + x[j].imag() * y[j].real());
  }
  return sum;
}

}  // namespace bgq::kernels::avx2
