#include <algorithm>

#include "cli.hpp"

namespace besovop::cli {

std::vector<SampledKernel> corpus(int levels) {
  const DyadicGrid g{levels, 0.0, 1.0};
  // Planted scales stop at level 4 so refining the grid keeps the symbol.
  const double finest = std::min(4, levels - 1);
  const std::vector<KernelSpec> specs{
      {KernelFamily::TensorBump, {{"amplitude", 1.0}, {"c1", 0.5}, {"c2", 0.5}, {"w1", 0.3}, {"w2", 0.3}}, {}, "bump"},
      {KernelFamily::SeparableGaussian, {{"c1", 0.3}, {"c2", 0.6}, {"sigma1", 0.06}, {"sigma2", 0.1}}, {}, "gaussian_narrow"},
      {KernelFamily::SeparableGaussian, {{"c1", 0.5}, {"c2", 0.5}, {"sigma1", 0.25}, {"sigma2", 0.25}}, {}, "gaussian_wide"},
      {KernelFamily::FractionalRough, {{"alpha", 0.75}, {"finest_level", finest}}, 3, "rough_a0.75"},
      {KernelFamily::WaveletSynthetic, {{"alpha", 1.0}, {"p", 1.0}, {"finest_level", finest}}, 1, "synthetic_a1"},
      {KernelFamily::WaveletSynthetic, {{"alpha", 1.5}, {"p", 2.0 / 3.0}, {"finest_level", finest}}, 2, "synthetic_a1.5"},
  };
  std::vector<SampledKernel> out;
  out.push_back(SampledKernel{g, g, Matrix(g.point_count(), g.point_count(), 1.0), "constant"});
  for (const KernelSpec& s : specs) out.push_back(sample_builtin(s, g, g));
  std::sort(out.begin(), out.end(), [](const SampledKernel& a, const SampledKernel& b) { return a.label < b.label; });
  return out;
}

}  // namespace besovop::cli
