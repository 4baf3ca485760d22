#include "besovop/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "besovop/error.hpp"
#include "besovop/simd.hpp"

namespace besovop {
namespace {

// Pairs count as orthogonal below this cosine; rounding in a dot product of
// length n is about n * 1e-16, so a tighter value can stall.
constexpr double kOrthogonalityTol = 1e-13;
// Rows whose norm is at rounding level relative to the whole matrix hold
// only noise; their cosines with other rows never settle.
constexpr double kNegligibleRow = 1e-15;

}  // namespace

SvdResult jacobi_svd(const Matrix& a, bool want_vectors) {
  const bool transpose = a.rows() > a.cols();
  Matrix b = transpose ? a.transposed() : a;
  const std::size_t r = b.rows();
  Matrix q;  // accumulated Q^T, rotated alongside b
  if (want_vectors) {
    q = Matrix(r, r);
    for (std::size_t i = 0; i < r; ++i) q(i, i) = 1.0;
  }

  const double negligible = kNegligibleRow * kNegligibleRow * static_cast<double>(r) * simd::sum_squares(b.data());
  SvdResult out;
  bool converged = r < 2;
  while (!converged) {
    if (out.sweeps == kMaxJacobiSweeps)
      throw Error(ErrorCode::ConvergenceFailure,
                  "Jacobi SVD did not converge in " + std::to_string(kMaxJacobiSweeps) + " sweeps");
    ++out.sweeps;
    converged = true;
    for (std::size_t i = 0; i + 1 < r; ++i) {
      for (std::size_t k = i + 1; k < r; ++k) {
        const simd::Gram2 g = simd::gram2(b.row(i), b.row(k));
        if (g.ab == 0.0 || std::abs(g.ab) <= kOrthogonalityTol * std::sqrt(g.aa * g.bb)) continue;
        if (g.aa <= negligible || g.bb <= negligible) continue;
        converged = false;
        const double zeta = (g.bb - g.aa) / (2.0 * g.ab);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        simd::rotate(b.row(i), b.row(k), c, s);
        if (want_vectors) simd::rotate(q.row(i), q.row(k), c, s);
      }
    }
  }

  std::vector<double> sigma(r);
  for (std::size_t i = 0; i < r; ++i) sigma[i] = std::sqrt(simd::sum_squares(b.row(i)));
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  out.values.resize(r);
  for (std::size_t i = 0; i < r; ++i) out.values[i] = sigma[order[i]];
  if (!want_vectors) return out;

  // b = Q^T B_original has rows sigma_i w_i^T; B_original = Q Sigma W^T.
  const std::size_t c = b.cols();
  Matrix left(r, r), right(c, r);
  for (std::size_t idx = 0; idx < r; ++idx) {
    const std::size_t i = order[idx];
    for (std::size_t m = 0; m < r; ++m) left(m, idx) = q(i, m);
    if (sigma[i] > 0.0)
      for (std::size_t m = 0; m < c; ++m) right(m, idx) = b(i, m) / sigma[i];
  }
  if (transpose) {
    out.u = std::move(right);
    out.v = std::move(left);
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

}  // namespace besovop
