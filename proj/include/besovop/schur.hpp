#pragma once

// Schur multipliers on the Schatten classes: sampled rank-one lower bounds,
// strip-partition, wavelet-slice and Besov upper bounds, and a brute-force
// oracle for small matrices.
//
// A sampled symbol acts on a rank-one operator u v^T as diag(u) K diag(v),
// so every bound below is a statement about the matrix K of samples.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "besovop/kernel.hpp"
#include "besovop/matrix.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {

class SchurSymbol {
 public:
  static SchurSymbol from_kernel(SampledKernel kernel);
  /// ShapeMismatch unless square.
  static SchurSymbol from_matrix(Matrix a);

  bool is_matrix() const noexcept { return !kernel_.has_value(); }
  const Matrix& values() const noexcept { return values_; }
  const SampledKernel* kernel() const noexcept { return kernel_ ? &*kernel_ : nullptr; }
  /// sup |k| over the samples.
  double bounded_norm() const noexcept { return bounded_norm_; }
  /// Coordinate of row i: the x grid point, or i itself for matrices.
  double row_coordinate(std::size_t i) const noexcept;

 private:
  Matrix values_;
  std::optional<SampledKernel> kernel_;
  double bounded_norm_ = 0.0;
};

/// p♭ = 2p / (2 - p); infinite at p = 2.
double p_flat(double p);

/// Entrywise product; ShapeMismatch when the shapes differ.
Matrix apply_multiplier(const SchurSymbol& k, const Matrix& phi);
SampledKernel apply_multiplier(const SchurSymbol& k, const SampledKernel& phi);

/// ||diag(u) K diag(v)||_p.
double rank_one_objective(const Matrix& k, const std::vector<double>& u, const std::vector<double>& v, double p);

struct RankOneBound {
  double value = 0.0;
  std::vector<double> xi;   // unit vector over rows (discrete l2)
  std::vector<double> eta;  // unit vector over columns
  std::size_t best_sample = 0;
  bool heuristic = false;   // p > 1: still a lower bound, not the exact supremum formula
  std::uint64_t seed = 0;
};

/// Best ||diag(u) K diag(v)||_p over seeded starting pairs refined by
/// projected-gradient ascent. Start 0 is the uniform pair, start 1 the
/// indicator pair at the largest |K_im|, the rest are Gaussian. Only
/// improving steps are accepted, so the value is nondecreasing in both
/// `samples` and `ascent_steps`. InvalidExponent unless 0 < p <= 2.
RankOneBound rank_one_lower_bound(const SchurSymbol& k, double p, std::size_t samples, std::size_t ascent_steps,
                                  std::uint64_t seed);

/// Rigorous per-block bound from the singular value decomposition
/// K = sum_r sigma_r a_r b_r^T: (sum_r (sigma_r |a_r|_inf |b_r|_inf)^tau)^{1/tau}
/// with tau = min(p, 1). Equals |a|_inf |b|_inf for product symbols.
double factorization_bound(const Matrix& k, double p);

/// (sum_i v_i^{p♭})^{1/p♭} (the maximum when p = 2).
double aggregate_strips(const std::vector<double>& values, double p);

struct StripBound {
  std::size_t first_row = 0;
  std::size_t last_row = 0;  // exclusive
  double value = 0.0;
  std::string method;        // "product_form", "factorization" or "sup_norm"
};

struct PartitionBound {
  double value = 0.0;
  std::vector<StripBound> strips;
};

/// Strips [t_r, t_{r+1}) of the row coordinate; each strip bounded by
/// factorization_bound (and by sup |k| when p = 2), aggregated with
/// aggregate_strips. EmptyPartition for fewer than two breakpoints or
/// breakpoints that leave rows uncovered. InvalidExponent unless 0 < p <= 2.
PartitionBound partition_upper_bound(const SchurSymbol& k, const std::vector<double>& breakpoints, double p);

/// Breakpoints splitting the row range into `count` equal strips.
std::vector<double> uniform_breakpoints(const SchurSymbol& k, std::size_t count);

/// One level of the expansion k(t, s) = sum_l atom_l(t) coefficient_l(s).
/// atoms are the synthesis functions of the calibrated transform sampled on
/// the t grid, so the expansion reproduces k up to rounding.
struct SliceLevel {
  int j = 0;
  bool scaling = false;
  Matrix atoms;         // row l: samples over the t grid
  Matrix coefficients;  // row l: k_{j,l} over the s grid
  /// Translations whose atoms have pairwise disjoint supports share a class
  /// index l mod classes.
  std::size_t classes = 1;
};

std::vector<SliceLevel> wavelet_slices(const SampledKernel& k, const WaveletFilter& filter, int coarsest_level = 0);

Matrix reconstruct_slices(const std::vector<SliceLevel>& slices);

struct SliceBound {
  double value = 0.0;
  double scaling_part = 0.0;
  std::vector<double> level_values;  // detail levels, coarse to fine
  /// Smallest C with level bound <= C (2^j/L)^{1/2} l_{p♭}(|k_{j,l}|_inf).
  double constant = 0.0;
};

/// Rank-one bound for each term, l_{p♭} within each disjoint class, and the
/// tau-triangle inequality across classes and levels (tau = min(p, 1)).
SliceBound wavelet_slice_bound(const SampledKernel& k, const WaveletFilter& filter, double p,
                               int coarsest_level = 0);

struct SchurOptions {
  std::size_t samples = 24;
  std::size_t ascent_steps = 30;
  std::uint64_t seed = 1;
  std::size_t strips = 4;
  int coarsest_level = 0;
};

struct SchurReport {
  std::string label;
  double p = 0.0;
  std::uint64_t seed = 0;
  double bounded_norm = 0.0;
  RankOneBound lower;
  PartitionBound partition;
  SliceBound wavelet_slice;
  double seminorm = 0.0;         // s = 1/p♭, inner p♭, outer p, sup-norm values
  double rhs = 0.0;              // seminorm + bounded_norm
  double besov_upper = 0.0;      // rigorous bound built from the slice constant
  double empirical_constant = 0.0;  // lower / rhs
  bool heuristic = false;           // p > 1
  bool consistent = true;           // lower <= every upper bound + 1e-6

  double lower_bound() const noexcept { return lower.value; }
  double min_upper() const noexcept;
};

inline constexpr double kSchurSoundnessTolerance = 1e-6;

/// InvalidExponent unless 0 < p < 2.
SchurReport besov_schur_estimate(const SampledKernel& k, const WaveletFilter& filter, double p,
                                 const SchurOptions& options = {});

struct OracleResult {
  double value = 0.0;
  double batch_values[2] = {0.0, 0.0};
  double spread = 0.0;  // |batch0 - batch1| / value
};

inline constexpr std::size_t kOracleMaxDimension = 8;

/// sup over unit u, v of ||A o (u v^T)||_p by derivative-free plane-rotation
/// search from `starts` random pairs, in two independently seeded batches.
/// MatrixTooLarge above 8 x 8; InvalidExponent unless 0 < p <= 2.
OracleResult matrix_mp_oracle(const Matrix& a, double p, std::size_t starts, std::uint64_t seed);

}  // namespace besovop
