#pragma once

// Kernels k(x, y) sampled on dyadic boxes: analytic test families, kernels
// synthesized from planted wavelet coefficients (with their exact Besov
// seminorm as ground truth), and the plain-text kernel file format.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "besovop/matrix.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {

/// values(i, m) = k(x_i, y_m); rows follow the x grid.
struct SampledKernel {
  DyadicGrid grid_x;
  DyadicGrid grid_y;
  Matrix values;
  std::string label;

  /// Grid L2 norm (h_x h_y sum k^2)^{1/2}.
  double l2_norm() const;
  /// Largest |k| over the samples.
  double sup_norm() const;
};

/// Throws ShapeMismatch / FormatError when the matrix does not fit the grids
/// or holds non-finite values.
void validate(const SampledKernel& k);

enum class KernelFamily { SeparableGaussian, TensorBump, FractionalRough, WaveletSynthetic, File };

std::string to_string(KernelFamily f);
KernelFamily parse_family(const std::string& name);

struct KernelSpec {
  KernelFamily family = KernelFamily::SeparableGaussian;
  std::map<std::string, double> parameters;
  std::optional<std::uint64_t> seed;
  std::string label;
};

/// Parameters per family (all others are optional with defaults):
///   separable_gaussian: c1 c2 sigma1 sigma2
///   tensor_bump:        amplitude c1 c2 w1 w2
///   fractional_rough:   alpha                (seed required)
///   wavelet_synthetic:  alpha p              (seed required)
/// The two random families also read order (filter N, default 3), j0,
/// finest_level, density, y_modes and confine (0/1).
SampledKernel sample_builtin(const KernelSpec& spec, const DyadicGrid& grid_x, const DyadicGrid& grid_y);

/// One continuum-calibrated coefficient c_{j,k}: a vector over the y grid.
struct PlantedCoefficient {
  int j = 0;
  long long k = 0;
  std::vector<double> value;
};

/// Kernel whose analysis on `filter` returns exactly `planted` as detail
/// coefficients (zero elsewhere, zero scaling part).
SampledKernel synthesize_kernel(const std::vector<PlantedCoefficient>& planted, const WaveletFilter& filter,
                                const DyadicGrid& grid_x, const DyadicGrid& grid_y, int coarsest_level = 0);

/// Exact Besov seminorm of a planted set at s = alpha, inner and outer
/// exponent p, E = L2 over the y grid. Uses the same weights as
/// besov_seminorm.
double planted_seminorm(const std::vector<PlantedCoefficient>& planted, double alpha, double p,
                        const DyadicGrid& grid_x, const DyadicGrid& grid_y);

struct SynthesisOptions {
  int coarsest_level = 0;
  int finest_level = -1;   // last planted level; -1 means J_x - 1
  double density = 0.35;   // probability that a candidate translation is planted
  int y_modes = 48;        // cosine modes in each random y-profile
  bool confine = true;     // plant only wavelets supported in the central half of the x box
};

struct SynthesisResult {
  SampledKernel kernel;
  double ground_truth = 0.0;
  std::vector<PlantedCoefficient> planted;
};

/// Random planted kernel with ||c_{j,k}||_{L2} = (2^j/L)^{-(alpha+1/2)} xi_{j,k};
/// xi is a seeded sparse amplitude pattern and each y-profile is a smooth
/// random function supported in the central half of the y box. The random
/// draws for (j, k) depend only on (seed, j, k), so the same continuum
/// kernel is produced on every grid that resolves the planted levels.
SynthesisResult synthesize_from_coefficients(double alpha, double p, const WaveletFilter& filter,
                                             const DyadicGrid& grid_x, const DyadicGrid& grid_y,
                                             std::uint64_t seed, const SynthesisOptions& options = {});

/// The random families of sample_builtin together with their ground truth.
/// UnknownFamily for the deterministic families.
SynthesisResult synthesize_builtin(const KernelSpec& spec, const DyadicGrid& grid_x, const DyadicGrid& grid_y);

/// Kernel file: "KERNEL v1", then "Jx Jy ax bx ay by", then 2^Jx rows of
/// 2^Jy values. Values use shortest round-trip formatting.
void write_kernel(const std::string& path, const SampledKernel& kernel);
SampledKernel load_kernel(const std::string& path);

}  // namespace besovop
