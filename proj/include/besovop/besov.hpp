#pragma once

// Vector-valued wavelet coefficients of kernels in the first variable, Besov
// semi-quasinorms, greedy n-term approximation and approximation numbers.

#include <cstddef>
#include <span>
#include <vector>

#include "besovop/kernel.hpp"
#include "besovop/matrix.hpp"
#include "besovop/seqspace.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {

enum class ValueNorm { L2, Linf };

/// Smoothness s, inner exponent p, outer exponent q (may be kInfinity) and
/// the norm taken on each coefficient vector.
struct BesovParams {
  double s = 0.0;
  double p = 1.0;
  double q = 1.0;
  ValueNorm value_norm = ValueNorm::L2;

  /// InvalidBesovParams unless p > 0, q > 0 and s > max(1/p - 1, 0).
  void validate() const;
};

/// c_{j,k} for j in [coarsest_level, levels), continuum-calibrated. Row k of
/// detail(j) is the coefficient vector over the y grid.
struct CoefficientField {
  int coarsest_level = 0;
  int levels = 0;
  WaveletFilter filter;
  DyadicGrid grid_x;
  DyadicGrid grid_y;
  Matrix scaling;
  std::vector<Matrix> details;

  double y_spacing() const noexcept { return grid_y.spacing(); }
  const Matrix& detail(int j) const { return details.at(static_cast<std::size_t>(j - coarsest_level)); }
  Matrix& detail(int j) { return details.at(static_cast<std::size_t>(j - coarsest_level)); }
  /// Number of detail entries (the scaling part is not counted).
  std::size_t entry_count() const noexcept;
  /// h_y times the sum of squares of every stored value, scaling included.
  double energy() const;
};

/// Batched calibrated DWT of every y-column of the kernel.
CoefficientField analyze_kernel(const SampledKernel& kernel, const WaveletFilter& filter, int coarsest_level);

/// Inverse of analyze_kernel.
Matrix synthesize_field(const CoefficientField& field);

struct CoefficientNorm {
  int j = 0;
  long long k = 0;
  double norm = 0.0;
};

double vector_norm(std::span<const double> v, ValueNorm norm, double spacing);

/// Norms of every detail entry, sorted by (j, k).
std::vector<CoefficientNorm> coefficient_norms(const CoefficientField& field, ValueNorm norm);

/// Outer l_q over levels of (2^j/L)^{s+1/2-1/p} times the inner l_p of the
/// level's norms. norms_by_level[i] belongs to level coarsest_level + i.
/// When q == p the weighted norms are pooled into a single l_p sum.
double besov_from_level_norms(std::span<const std::vector<double>> norms_by_level, int coarsest_level,
                              const BesovParams& params, double box_length);

/// Seminorm over the detail entries; the scaling part is excluded.
double besov_seminorm(const CoefficientField& field, const BesovParams& params);

/// Keeps the n detail entries of largest norm (ties: smaller (j, k) first)
/// and zeroes the others. The scaling part is always kept.
CoefficientField greedy_n_term(const CoefficientField& field, std::size_t n, ValueNorm norm);

/// E_n = (sum_{i >= n+1} b_i^2)^{1/2} for n = 0 .. count-1, with b the
/// decreasing rearrangement of the L2 detail norms (0-based).
NonnegSeq approx_numbers(const CoefficientField& field);

/// lorentz_pq(E, 1/alpha, q).
double approx_space_quasinorm(const NonnegSeq& errors, double alpha, double q);

struct NonlinearReport {
  double p = 0.0;
  double alpha = 0.0;
  double approx_quasinorm = 0.0;  // lorentz_pq((||k||, E_0, E_1, ...), 1/alpha, p)
  double l2_norm = 0.0;
  double seminorm = 0.0;          // s = alpha, inner = outer = p, L2 values
  double rhs = 0.0;               // l2_norm + seminorm
  double ratio = 0.0;             // approx_quasinorm / rhs
  double coefficient_ell_p = 0.0; // l_p of all detail norms
};

/// Both sides of the n-term characterization at alpha = 1/p - 1/2.
/// InvalidBesovParams unless 0 < p < 2; ZeroKernel for k == 0.
NonlinearReport verify_nonlinear_equivalence(const SampledKernel& kernel, const WaveletFilter& filter, double p,
                                             int coarsest_level = 0);

}  // namespace besovop
