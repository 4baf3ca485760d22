#include <cmath>

#include "besovop/simd.hpp"

namespace besovop::simd::detail {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::fmax(m, std::fabs(x[i]));
  return m;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

Gram2 gram2_scalar(const double* a, const double* b, std::size_t n) {
  Gram2 g;
  for (std::size_t i = 0; i < n; ++i) {
    g.aa += a[i] * a[i];
    g.bb += b[i] * b[i];
    g.ab += a[i] * b[i];
  }
  return g;
}

void rotate_scalar(double* a, double* b, double c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ai = a[i];
    const double bi = b[i];
    a[i] = c * ai - s * bi;
    b[i] = s * ai + c * bi;
  }
}

void hadamard_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

constexpr KernelTable kScalar{dot_scalar,    sum_squares_scalar, max_abs_scalar,  axpy_scalar,
                              gram2_scalar,  rotate_scalar,      hadamard_scalar, scale_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace besovop::simd::detail
