#pragma once

// Discretized integral operators, their singular spectra, Schatten and
// Lorentz quasinorms, and the checks relating them to kernel regularity.

#include <cstddef>
#include <string>
#include <vector>

#include "besovop/kernel.hpp"
#include "besovop/matrix.hpp"
#include "besovop/seqspace.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {

/// A(i, m) = k(x_i, y_m) sqrt(h_x h_y); its Frobenius norm is the grid L2
/// norm of k.
struct DiscreteOperator {
  Matrix matrix;
  std::string source;
};

DiscreteOperator discretize(const SampledKernel& kernel);

inline constexpr double kDefaultRankTolerance = 1e-10;

struct SingularSpectrum {
  NonnegSeq mu;                                   // nonincreasing
  double rank_tolerance = kDefaultRankTolerance;  // relative to mu(0)

  std::size_t size() const noexcept { return mu.size(); }
  /// Number of mu(n) above rank_tolerance * mu(0).
  std::size_t rank() const noexcept;
};

/// Sorts the values into nonincreasing order.
SingularSpectrum make_spectrum(std::vector<double> values);

SingularSpectrum singular_values(const DiscreteOperator& op);
SingularSpectrum singular_values(const Matrix& a);

double schatten(const SingularSpectrum& s, double p);
double schatten_lorentz(const SingularSpectrum& s, double p, double q);

/// e_n = (sum_{k >= n+1} mu_k^2)^{1/2}, n = 0 .. len-1.
NonnegSeq hs_approx_numbers(const SingularSpectrum& s);

/// Checker result. Degenerate 0/0 quotients count as 0 and set the flag.
struct RatioCheck {
  double value = 0.0;
  bool degenerate = false;
  std::size_t worst_index = 0;
};

/// max over n >= 1, 2n < len of mu(2n) sqrt(n) / e(n). SpectrumTooShort
/// below three values.
RatioCheck check_mu_estimate(const SingularSpectrum& s);

/// lorentz_pq((e_n / (n+1)^{1/2})_n, p, q) / schatten_lorentz(s, p, q).
/// Requires 0 < p < 2; ZeroSpectrum when mu vanishes.
RatioCheck check_lpq_equivalence(const SingularSpectrum& s, double p, double q);

struct EmbeddingCase {
  std::string label;
  double lhs = 0.0;       // ||Op(k)||_p
  double l2_norm = 0.0;
  double seminorm = 0.0;  // s = 1/p - 1/2, inner = outer = p, L2 values
  double rhs = 0.0;
  double ratio = 0.0;
};

struct EmbeddingReport {
  double p = 0.0;
  std::vector<EmbeddingCase> cases;  // input order
  double max_ratio = 0.0;
};

/// Per-kernel Schatten norm against ||k||_2 + Besov seminorm. Kernels are
/// processed in parallel. ZeroKernel for a vanishing kernel.
EmbeddingReport verify_main_embedding(const std::vector<SampledKernel>& kernels, const WaveletFilter& filter,
                                      double p, int coarsest_level = 0);

/// Half-open index range [first, last).
struct FitRange {
  std::size_t first = 0;
  std::size_t last = 0;
};

/// The decade [n_c / sqrt(10), n_c sqrt(10)] around n_c = sqrt(length).
FitRange middle_decade(std::size_t length);

/// Least-squares slope of log mu(n) against log(n+1) over the range.
/// SpectrumTooShort when the range has fewer than two points or leaves the
/// spectrum; NonpositiveValuesInRange when some mu(n) <= 0 there.
double decay_rate(const SingularSpectrum& s, FitRange range);

}  // namespace besovop
