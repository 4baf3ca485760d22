// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "besovop/simd.hpp"

#if defined(BESOVOP_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace besovop::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares_avx2(const double* x, std::size_t n) { return dot_avx2(x, x, n); }

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::fmax(std::fmax(lanes[0], lanes[1]), std::fmax(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

Gram2 gram2_avx2(const double* a, const double* b, std::size_t n) {
  __m256d aa = _mm256_setzero_pd();
  __m256d bb = _mm256_setzero_pd();
  __m256d ab = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    aa = _mm256_fmadd_pd(va, va, aa);
    bb = _mm256_fmadd_pd(vb, vb, bb);
    ab = _mm256_fmadd_pd(va, vb, ab);
  }
  Gram2 g{hsum(aa), hsum(bb), hsum(ab)};
  for (; i < n; ++i) {
    g.aa += a[i] * a[i];
    g.bb += b[i] * b[i];
    g.ab += a[i] * b[i];
  }
  return g;
}

void rotate_avx2(double* a, double* b, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(a + i, _mm256_fmsub_pd(vc, va, _mm256_mul_pd(vs, vb)));
    _mm256_storeu_pd(b + i, _mm256_fmadd_pd(vs, va, _mm256_mul_pd(vc, vb)));
  }
  for (; i < n; ++i) {
    const double ai = a[i];
    const double bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

void hadamard_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_avx2(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

constexpr KernelTable kAvx2{dot_avx2,   sum_squares_avx2, max_abs_avx2,  axpy_avx2,
                            gram2_avx2, rotate_avx2,      hadamard_avx2, scale_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace besovop::simd::detail

#else

namespace besovop::simd::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace besovop::simd::detail

#endif
