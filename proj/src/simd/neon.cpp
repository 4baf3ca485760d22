#include "besovop/simd.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace besovop::simd::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) r = std::fmax(r, std::fabs(x[i]));
  return r;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

Gram2 gram2_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t aa = vdupq_n_f64(0.0);
  float64x2_t bb = vdupq_n_f64(0.0);
  float64x2_t ab = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    aa = vfmaq_f64(aa, va, va);
    bb = vfmaq_f64(bb, vb, vb);
    ab = vfmaq_f64(ab, va, vb);
  }
  Gram2 g{vaddvq_f64(aa), vaddvq_f64(bb), vaddvq_f64(ab)};
  for (; i < n; ++i) {
    g.aa += a[i] * a[i];
    g.bb += b[i] * b[i];
    g.ab += a[i] * b[i];
  }
  return g;
}

void rotate_neon(double* a, double* b, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t va = vld1q_f64(a + i);
    const float64x2_t vb = vld1q_f64(b + i);
    vst1q_f64(a + i, vfmsq_f64(vmulq_f64(vc, va), vs, vb));
    vst1q_f64(b + i, vfmaq_f64(vmulq_f64(vc, vb), vs, va));
  }
  for (; i < n; ++i) {
    const double ai = a[i];
    const double bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

void hadamard_neon(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_neon(double a, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

constexpr KernelTable kNeon{dot_neon,   sum_squares_neon, max_abs_neon,  axpy_neon,
                            gram2_neon, rotate_neon,      hadamard_neon, scale_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeon; }

}  // namespace besovop::simd::detail

#else

namespace besovop::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace besovop::simd::detail

#endif
