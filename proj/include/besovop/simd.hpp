#pragma once

// Data-parallel inner loops shared by the transforms, the SVD and the Schur
// code. Each kernel has a scalar reference implementation and vectorized
// variants; the variant is chosen once at startup from the CPU features and
// can be overridden (BESOVOP_SIMD=scalar, or set_backend in tests).

#include <span>
#include <string_view>

namespace besovop::simd {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b) noexcept;

/// True when the variant was compiled in and the running CPU supports it.
bool available(Backend b) noexcept;

Backend active_backend() noexcept;

/// Switches every kernel to `b`. Returns false (and changes nothing) when `b`
/// is not available. Not thread-safe; call before spawning workers.
bool set_backend(Backend b) noexcept;

struct Gram2 {
  double aa = 0.0;
  double bb = 0.0;
  double ab = 0.0;
};

double dot(std::span<const double> x, std::span<const double> y);
double sum_squares(std::span<const double> x);
double max_abs(std::span<const double> x);
/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
/// Norms and inner product of a pair, in one pass.
Gram2 gram2(std::span<const double> a, std::span<const double> b);
/// (a, b) <- (c a - s b, s a + c b)
void rotate(std::span<double> a, std::span<double> b, double c, double s);
/// out = x .* y (out may alias x or y)
void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> out);
/// x *= a
void scale(double a, std::span<double> x);

namespace detail {

struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum_squares)(const double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  Gram2 (*gram2)(const double*, const double*, std::size_t);
  void (*rotate)(double*, double*, double, double, std::size_t);
  void (*hadamard)(const double*, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;  // nullptr when not compiled in

}  // namespace detail

}  // namespace besovop::simd
