#pragma once

// Compactly supported orthonormal wavelets on a periodized dyadic box:
// filter construction, pointwise evaluation, forward/inverse transforms.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "besovop/matrix.hpp"

namespace besovop {

enum class WaveletFamily { Haar, Daubechies };

inline constexpr int kMaxVanishingMoments = 10;

/// Orthonormal two-channel filter pair. lowpass has 2N taps with
/// sum sqrt(2); highpass is its quadrature mirror g_k = (-1)^k h_{2N-1-k}.
struct WaveletFilter {
  std::string family_name;
  int vanishing_moments = 0;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t taps() const noexcept { return lowpass.size(); }
  int support_length() const noexcept { return 2 * vanishing_moments - 1; }
  /// "haar" or "daubechies:N"
  std::string label() const;
};

/// N in [1, kMaxVanishingMoments]; throws UnsupportedOrder otherwise.
/// Haar is the N = 1 member of the Daubechies family.
WaveletFilter build_filter(WaveletFamily family, int vanishing_moments);

/// Parses "haar", "daubechies:N" or "dbN".
WaveletFilter parse_filter(std::string_view spec);

/// Uniform periodized grid of 2^levels points on [a, b).
struct DyadicGrid {
  int levels = 0;
  double a = 0.0;
  double b = 1.0;

  std::size_t point_count() const noexcept { return std::size_t{1} << levels; }
  double length() const noexcept { return b - a; }
  double spacing() const noexcept { return (b - a) / static_cast<double>(point_count()); }
  double point(std::size_t i) const noexcept { return a + static_cast<double>(i) * spacing(); }

  friend bool operator==(const DyadicGrid&, const DyadicGrid&) = default;
};

bool is_power_of_two(std::size_t n) noexcept;
/// log2 of a power of two; throws LengthNotPowerOfTwo otherwise.
int log2_exact(std::size_t n);

enum class Normalization {
  Orthonormal,  // plain discrete orthonormal coefficients
  Continuum,    // discrete coefficient * sqrt(spacing), estimating <phi_jk, f>
};

/// Coefficients of one or several signals transformed together. Each block
/// has one row per translation and one column per signal.
struct WaveletPyramid {
  int coarsest_level = 0;
  int levels = 0;
  Matrix scaling;               // 2^coarsest_level x columns
  std::vector<Matrix> details;  // details[j - coarsest_level]: 2^j x columns
  Normalization normalization = Normalization::Orthonormal;
  double spacing = 1.0;  // grid spacing used by the Continuum convention

  std::size_t columns() const noexcept { return scaling.cols(); }
  const Matrix& detail(int j) const { return details.at(static_cast<std::size_t>(j - coarsest_level)); }
  Matrix& detail(int j) { return details.at(static_cast<std::size_t>(j - coarsest_level)); }
  /// Sum of squares of every stored coefficient.
  double energy() const;
};

/// Periodized orthonormal DWT of one signal of length 2^J down to level j0.
WaveletPyramid forward_dwt(std::span<const double> samples, const WaveletFilter& filter, int coarsest_level);

/// Transforms every column of `samples` along the row index (the signals are
/// the columns, stored row-major so each analysis tap is a vector axpy).
WaveletPyramid forward_dwt_columns(const Matrix& samples, const WaveletFilter& filter, int coarsest_level);

/// Inverse of forward_dwt for single-column pyramids; throws ShapeMismatch.
std::vector<double> inverse_dwt(const WaveletPyramid& pyramid, const WaveletFilter& filter);

/// Inverse of forward_dwt_columns.
Matrix inverse_dwt_columns(const WaveletPyramid& pyramid, const WaveletFilter& filter);

/// Rescales an orthonormal pyramid by sqrt(spacing) so coefficients estimate
/// the continuum inner products <phi_{j,k}, f>. inverse_dwt undoes it.
WaveletPyramid to_continuum(WaveletPyramid pyramid, double spacing);

/// Values of the scaling function and mother wavelet at the dyadic points
/// m / 2^resolution, m = 0 .. support_length * 2^resolution.
struct CascadeResult {
  int resolution = 0;
  std::vector<double> scaling;
  std::vector<double> wavelet;
  /// Largest change at points shared by the last two refinement iterates.
  double residual = 0.0;
};

/// Exact-at-dyadics cascade: integer values from the eigenvector of the
/// refinement matrix, then `refinements` applications of the two-scale
/// relation, each recomputing every point from the previous iterate.
CascadeResult cascade(const WaveletFilter& filter, int refinements);

inline constexpr double kCascadeTolerance = 1e-9;
inline constexpr int kMaxCascadeResolution = 24;

/// Samples of the level-j wavelet with translation k attached to the box,
/// phi_{j,k}(x) = (2^j/L)^{1/2} psi(2^j (x-a)/L - k), periodized over [a,b).
/// For the unit box this is the usual 2^{j/2} psi(2^j x - k).
std::vector<double> evaluate_wavelet(const WaveletFilter& filter, int j, long long k, const DyadicGrid& grid);

/// Dilation 2^j / L of discrete level j on a box of length L.
double level_dilation(int j, double box_length) noexcept;

}  // namespace besovop
