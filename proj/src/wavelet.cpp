#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "besovop/error.hpp"
#include "besovop/simd.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {
namespace {

void check_pyramid_shape(const WaveletPyramid& p) {
  if (p.coarsest_level < 0 || p.coarsest_level >= p.levels)
    throw Error(ErrorCode::ShapeMismatch, "pyramid level range is empty");
  if (p.scaling.rows() != (std::size_t{1} << p.coarsest_level))
    throw Error(ErrorCode::ShapeMismatch, "scaling block has the wrong number of rows");
  if (p.details.size() != static_cast<std::size_t>(p.levels - p.coarsest_level))
    throw Error(ErrorCode::ShapeMismatch, "detail level count does not match level range");
  for (int j = p.coarsest_level; j < p.levels; ++j) {
    const Matrix& d = p.detail(j);
    if (d.rows() != (std::size_t{1} << j) || d.cols() != p.scaling.cols())
      throw Error(ErrorCode::ShapeMismatch, "detail block at level " + std::to_string(j) + " has the wrong shape");
  }
}

// Solves a small dense system in place (partial pivoting).
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    const double d = a[col][col];
    if (d == 0.0) throw Error(ErrorCode::ConvergenceFailure, "singular refinement system");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / d;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n))
    throw Error(ErrorCode::LengthNotPowerOfTwo, "length " + std::to_string(n) + " is not a power of two");
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

double level_dilation(int j, double box_length) noexcept { return std::ldexp(1.0, j) / box_length; }

double WaveletPyramid::energy() const {
  double e = simd::sum_squares(scaling.data());
  for (const Matrix& d : details) e += simd::sum_squares(d.data());
  return e;
}

WaveletPyramid forward_dwt_columns(const Matrix& samples, const WaveletFilter& filter, int coarsest_level) {
  const int levels = log2_exact(samples.rows());
  if (coarsest_level < 0 || coarsest_level >= levels)
    throw Error(ErrorCode::LevelOutOfRange, "coarsest level " + std::to_string(coarsest_level) +
                                                " outside [0, " + std::to_string(levels) + ")");
  const std::size_t cols = samples.cols();
  const std::size_t taps = filter.taps();

  WaveletPyramid out;
  out.coarsest_level = coarsest_level;
  out.levels = levels;
  out.details.resize(static_cast<std::size_t>(levels - coarsest_level));

  Matrix current = samples;
  for (int j = levels - 1; j >= coarsest_level; --j) {
    const std::size_t n = std::size_t{1} << (j + 1);
    const std::size_t half = n / 2;
    Matrix approx(half, cols);
    Matrix detail(half, cols);
    for (std::size_t i = 0; i < half; ++i) {
      for (std::size_t k = 0; k < taps; ++k) {
        const auto src = current.row((2 * i + k) % n);
        simd::axpy(filter.lowpass[k], src, approx.row(i));
        simd::axpy(filter.highpass[k], src, detail.row(i));
      }
    }
    out.detail(j) = std::move(detail);
    current = std::move(approx);
  }
  out.scaling = std::move(current);
  return out;
}

WaveletPyramid forward_dwt(std::span<const double> samples, const WaveletFilter& filter, int coarsest_level) {
  Matrix m(samples.size(), 1);
  std::copy(samples.begin(), samples.end(), m.data().begin());
  return forward_dwt_columns(m, filter, coarsest_level);
}

Matrix inverse_dwt_columns(const WaveletPyramid& pyramid, const WaveletFilter& filter) {
  check_pyramid_shape(pyramid);
  const std::size_t cols = pyramid.columns();
  const std::size_t taps = filter.taps();
  const double unscale =
      pyramid.normalization == Normalization::Continuum ? 1.0 / std::sqrt(pyramid.spacing) : 1.0;

  Matrix current = pyramid.scaling;
  if (unscale != 1.0) simd::scale(unscale, current.data());
  for (int j = pyramid.coarsest_level; j < pyramid.levels; ++j) {
    const std::size_t half = std::size_t{1} << j;
    const std::size_t n = 2 * half;
    const Matrix& detail = pyramid.detail(j);
    Matrix out(n, cols);
    for (std::size_t i = 0; i < half; ++i) {
      for (std::size_t k = 0; k < taps; ++k) {
        auto dst = out.row((2 * i + k) % n);
        simd::axpy(filter.lowpass[k], current.row(i), dst);
        simd::axpy(filter.highpass[k] * unscale, detail.row(i), dst);
      }
    }
    current = std::move(out);
  }
  return current;
}

std::vector<double> inverse_dwt(const WaveletPyramid& pyramid, const WaveletFilter& filter) {
  if (pyramid.columns() != 1)
    throw Error(ErrorCode::ShapeMismatch, "inverse_dwt expects a single-signal pyramid");
  const Matrix m = inverse_dwt_columns(pyramid, filter);
  return {m.data().begin(), m.data().end()};
}

WaveletPyramid to_continuum(WaveletPyramid pyramid, double spacing) {
  if (pyramid.normalization == Normalization::Continuum) return pyramid;
  const double s = std::sqrt(spacing);
  simd::scale(s, pyramid.scaling.data());
  for (Matrix& d : pyramid.details) simd::scale(s, d.data());
  pyramid.normalization = Normalization::Continuum;
  pyramid.spacing = spacing;
  return pyramid;
}

CascadeResult cascade(const WaveletFilter& filter, int refinements) {
  if (refinements < 0 || refinements > kMaxCascadeResolution)
    throw Error(ErrorCode::LevelOutOfRange, "cascade refinements must lie in [0, " +
                                                std::to_string(kMaxCascadeResolution) + "]");
  const auto& h = filter.lowpass;
  const auto& g = filter.highpass;
  const long long support = static_cast<long long>(h.size()) - 1;
  const double r2 = std::numbers::sqrt2;

  // Integer samples: eigenvector of M[n][m] = sqrt2 h_{2n-m} for eigenvalue 1,
  // with phi(support) = 0 and the partition-of-unity normalization. The rows
  // of M - I are linearly dependent, so the last one carries the constraint.
  const auto n = static_cast<std::size_t>(support);
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  std::vector<double> rhs(n, 0.0);
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      const long long tap = 2 * static_cast<long long>(row) - static_cast<long long>(col);
      if (tap >= 0 && tap < static_cast<long long>(h.size())) a[row][col] = r2 * h[static_cast<std::size_t>(tap)];
    }
    a[row][row] -= 1.0;
  }
  std::fill(a[n - 1].begin(), a[n - 1].end(), 1.0);
  rhs[n - 1] = 1.0;
  std::vector<double> phi = solve_dense(std::move(a), std::move(rhs));
  phi.push_back(0.0);

  // One refinement from level r-1 to level r, recomputing all points.
  auto refine = [&](const std::vector<double>& prev, int r) {
    const long long count = support * (1LL << r) + 1;
    const long long stride = r == 0 ? 1 : (1LL << (r - 1));
    const long long prev_count = static_cast<long long>(prev.size());
    std::vector<double> next(static_cast<std::size_t>(count), 0.0);
    for (long long m = 0; m < count; ++m) {
      double s = 0.0;
      for (std::size_t k = 0; k < h.size(); ++k) {
        // phi(m/2^r) = sqrt2 sum h_k phi(m/2^{r-1} - k)
        const long long idx = r == 0 ? 2 * m - static_cast<long long>(k)
                                     : m - static_cast<long long>(k) * stride;
        if (idx >= 0 && idx < prev_count) s += h[k] * prev[static_cast<std::size_t>(idx)];
      }
      next[static_cast<std::size_t>(m)] = r2 * s;
    }
    return next;
  };

  CascadeResult out;
  // Level-0 self-consistency: the integer values must be a fixed point.
  {
    const std::vector<double> again = refine(phi, 0);
    double diff = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) diff = std::max(diff, std::fabs(again[i] - phi[i]));
    out.residual = diff;
  }
  for (int r = 1; r <= refinements; ++r) {
    std::vector<double> next = refine(phi, r);
    double diff = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) diff = std::max(diff, std::fabs(next[2 * i] - phi[i]));
    out.residual = diff;
    phi = std::move(next);
  }

  const long long count = static_cast<long long>(phi.size());
  const long long scale = 1LL << refinements;
  std::vector<double> psi(phi.size(), 0.0);
  for (long long m = 0; m < count; ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const long long idx = 2 * m - static_cast<long long>(k) * scale;
      if (idx >= 0 && idx < count) s += g[k] * phi[static_cast<std::size_t>(idx)];
    }
    psi[static_cast<std::size_t>(m)] = r2 * s;
  }
  out.resolution = refinements;
  out.scaling = std::move(phi);
  out.wavelet = std::move(psi);
  return out;
}

std::vector<double> evaluate_wavelet(const WaveletFilter& filter, int j, long long k, const DyadicGrid& grid) {
  if (j < 0) throw Error(ErrorCode::LevelOutOfRange, "wavelet level must be nonnegative");
  const int resolution = grid.levels - j;
  if (resolution < 1)
    throw Error(ErrorCode::ResolutionTooCoarse, "level " + std::to_string(j) + " is not resolved by a 2^" +
                                                    std::to_string(grid.levels) + " grid");
  if (resolution > kMaxCascadeResolution)
    throw Error(ErrorCode::LevelOutOfRange, "grid is finer than the supported cascade resolution");

  const CascadeResult c = cascade(filter, resolution);
  if (c.residual > kCascadeTolerance)
    throw Error(ErrorCode::ConvergenceFailure, "cascade fixed-point residual too large");

  const long long points = static_cast<long long>(grid.point_count());
  const long long step = 1LL << resolution;  // grid points per unit of psi's argument
  const long long last = static_cast<long long>(c.wavelet.size()) - 1;
  const double amplitude = std::sqrt(level_dilation(j, grid.length()));

  std::vector<double> out(static_cast<std::size_t>(points), 0.0);
  long long shift = (k % (1LL << j)) * step;  // k is periodic with period 2^j
  for (long long i = 0; i < points; ++i) {
    long long m = ((i - shift) % points + points) % points;
    double s = 0.0;
    for (; m <= last; m += points) s += c.wavelet[static_cast<std::size_t>(m)];
    out[static_cast<std::size_t>(i)] = amplitude * s;
  }
  return out;
}

}  // namespace besovop
