#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "besovop/simd.hpp"

namespace besovop::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(BESOVOP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const detail::KernelTable* table_for(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return &detail::scalar_table();
    case Backend::Avx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Backend::Neon:
      return detail::neon_table();
  }
  return nullptr;
}

Backend initial_backend() noexcept {
  if (const char* env = std::getenv("BESOVOP_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Backend::Scalar;
    if (v == "avx2" && table_for(Backend::Avx2)) return Backend::Avx2;
    if (v == "neon" && table_for(Backend::Neon)) return Backend::Neon;
  }
  if (table_for(Backend::Avx2)) return Backend::Avx2;
  if (table_for(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

struct Active {
  std::atomic<Backend> backend;
  std::atomic<const detail::KernelTable*> table;
  Active() {
    const Backend b = initial_backend();
    backend.store(b);
    table.store(table_for(b));
  }
};

Active& active() noexcept {
  static Active a;
  return a;
}

inline const detail::KernelTable& kernels() noexcept {
  return *active().table.load(std::memory_order_relaxed);
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool available(Backend b) noexcept { return table_for(b) != nullptr; }

Backend active_backend() noexcept { return active().backend.load(); }

bool set_backend(Backend b) noexcept {
  const detail::KernelTable* t = table_for(b);
  if (t == nullptr) return false;
  active().table.store(t);
  active().backend.store(b);
  return true;
}

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return kernels().dot(x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x) { return kernels().sum_squares(x.data(), x.size()); }

double max_abs(std::span<const double> x) { return kernels().max_abs(x.data(), x.size()); }

void axpy(double a, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  kernels().axpy(a, x.data(), y.data(), x.size());
}

Gram2 gram2(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return kernels().gram2(a.data(), b.data(), a.size());
}

void rotate(std::span<double> a, std::span<double> b, double c, double s) {
  assert(a.size() == b.size());
  kernels().rotate(a.data(), b.data(), c, s, a.size());
}

void hadamard(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  assert(x.size() == y.size() && x.size() == out.size());
  kernels().hadamard(x.data(), y.data(), out.data(), x.size());
}

void scale(double a, std::span<double> x) { kernels().scale(a, x.data(), x.size()); }

}  // namespace besovop::simd
