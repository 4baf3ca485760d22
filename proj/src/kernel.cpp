#include "besovop/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/random.hpp"

namespace besovop {
namespace {

struct FamilyName {
  KernelFamily family;
  const char* name;
};

constexpr FamilyName kFamilies[] = {
    {KernelFamily::SeparableGaussian, "separable_gaussian"},
    {KernelFamily::TensorBump, "tensor_bump"},
    {KernelFamily::FractionalRough, "fractional_rough"},
    {KernelFamily::WaveletSynthetic, "wavelet_synthetic"},
    {KernelFamily::File, "file"},
};

double required(const KernelSpec& spec, const std::string& name) {
  auto it = spec.parameters.find(name);
  if (it == spec.parameters.end())
    throw Error(ErrorCode::ParameterMissing, to_string(spec.family) + " needs parameter '" + name + "'");
  return it->second;
}

double optional(const KernelSpec& spec, const std::string& name, double fallback) {
  auto it = spec.parameters.find(name);
  return it == spec.parameters.end() ? fallback : it->second;
}

std::vector<double> sample_1d(const DyadicGrid& g, auto&& f) {
  std::vector<double> v(g.point_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.point(i));
  return v;
}

SampledKernel outer_product(const DyadicGrid& gx, const DyadicGrid& gy, const std::vector<double>& u,
                            const std::vector<double>& v) {
  SampledKernel out{gx, gy, Matrix(u.size(), v.size()), {}};
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t m = 0; m < v.size(); ++m) out.values(i, m) = u[i] * v[m];
  return out;
}

// Smooth bump with value 1 at the centre and support |t| < 1.
double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

// Random y-profile supported in the central half of the y box, windowed by
// sin^2 and normalized to unit grid L2 norm.
std::vector<double> random_profile(Rng& rng, const DyadicGrid& gy, int modes) {
  std::vector<double> g(static_cast<std::size_t>(modes));
  for (double& c : g) c = rng.normal();
  const double lo = gy.a + 0.25 * gy.length();
  const double width = 0.5 * gy.length();
  std::vector<double> v(gy.point_count(), 0.0);
  double energy = 0.0;
  for (std::size_t m = 0; m < v.size(); ++m) {
    const double t = (gy.point(m) - lo) / width;
    if (t <= 0.0 || t >= 1.0) continue;
    const double w = std::sin(std::numbers::pi * t);
    double s = 0.0;
    for (int r = 0; r < modes; ++r) s += g[static_cast<std::size_t>(r)] * std::cos(std::numbers::pi * r * t);
    v[m] = w * w * s;
    energy += v[m] * v[m];
  }
  energy *= gy.spacing();
  if (energy > 0.0) {
    const double scale = 1.0 / std::sqrt(energy);
    for (double& x : v) x *= scale;
  }
  return v;
}

// Translations at level j whose support [k, k+S]/2^j lies in the central half
// of the box; when none fits, the single most central translation.
std::vector<long long> candidate_translations(int j, int support, bool confine) {
  const long long n = 1LL << j;
  std::vector<long long> out;
  if (!confine) {
    for (long long k = 0; k < n; ++k) out.push_back(k);
    return out;
  }
  for (long long k = 0; k < n; ++k)
    if (4 * k >= n && 4 * (k + support) <= 3 * n) out.push_back(k);
  if (out.empty()) out.push_back(std::max<long long>(0, (n - support) / 2));
  return out;
}

}  // namespace

double SampledKernel::l2_norm() const {
  double s = 0.0;
  for (double v : values.data()) s += v * v;
  return std::sqrt(s * grid_x.spacing() * grid_y.spacing());
}

double SampledKernel::sup_norm() const {
  double m = 0.0;
  for (double v : values.data()) m = std::max(m, std::abs(v));
  return m;
}

void validate(const SampledKernel& k) {
  if (k.values.rows() != k.grid_x.point_count() || k.values.cols() != k.grid_y.point_count())
    throw Error(ErrorCode::ShapeMismatch, "kernel matrix does not match its grids");
  if (!(k.grid_x.length() > 0.0) || !(k.grid_y.length() > 0.0))
    throw Error(ErrorCode::FormatError, "kernel box has nonpositive side length");
  for (double v : k.values.data())
    if (!std::isfinite(v)) throw Error(ErrorCode::FormatError, "kernel holds non-finite values");
}

std::string to_string(KernelFamily f) {
  for (const auto& e : kFamilies)
    if (e.family == f) return e.name;
  return "unknown";
}

KernelFamily parse_family(const std::string& name) {
  for (const auto& e : kFamilies)
    if (name == e.name) return e.family;
  throw Error(ErrorCode::UnknownFamily, "unknown kernel family '" + name + "'");
}

SampledKernel sample_builtin(const KernelSpec& spec, const DyadicGrid& gx, const DyadicGrid& gy) {
  SampledKernel out;
  switch (spec.family) {
    case KernelFamily::SeparableGaussian: {
      const double c1 = required(spec, "c1"), c2 = required(spec, "c2");
      const double s1 = required(spec, "sigma1"), s2 = required(spec, "sigma2");
      const auto u = sample_1d(gx, [&](double x) { return std::exp(-(x - c1) * (x - c1) / (s1 * s1)); });
      const auto v = sample_1d(gy, [&](double y) { return std::exp(-(y - c2) * (y - c2) / (s2 * s2)); });
      out = outer_product(gx, gy, u, v);
      break;
    }
    case KernelFamily::TensorBump: {
      const double amp = required(spec, "amplitude");
      const double c1 = required(spec, "c1"), c2 = required(spec, "c2");
      const double w1 = required(spec, "w1"), w2 = required(spec, "w2");
      const auto u = sample_1d(gx, [&](double x) { return amp * bump((x - c1) / w1); });
      const auto v = sample_1d(gy, [&](double y) { return bump((y - c2) / w2); });
      out = outer_product(gx, gy, u, v);
      break;
    }
    case KernelFamily::FractionalRough:
    case KernelFamily::WaveletSynthetic:
      out = synthesize_builtin(spec, gx, gy).kernel;
      break;
    case KernelFamily::File:
      throw Error(ErrorCode::UnknownFamily, "file kernels are read with load_kernel");
  }
  out.label = spec.label.empty() ? to_string(spec.family) : spec.label;
  return out;
}

SampledKernel synthesize_kernel(const std::vector<PlantedCoefficient>& planted, const WaveletFilter& filter,
                                const DyadicGrid& gx, const DyadicGrid& gy, int coarsest_level) {
  if (coarsest_level < 0 || coarsest_level >= gx.levels)
    throw Error(ErrorCode::ScaleRangeTooSmall, "coarsest level outside [0, Jx)");
  const std::size_t ny = gy.point_count();
  WaveletPyramid pyr;
  pyr.coarsest_level = coarsest_level;
  pyr.levels = gx.levels;
  pyr.scaling = Matrix(std::size_t{1} << coarsest_level, ny);
  for (int j = coarsest_level; j < gx.levels; ++j) pyr.details.emplace_back(std::size_t{1} << j, ny);
  pyr.normalization = Normalization::Continuum;
  pyr.spacing = gx.spacing();
  for (const auto& c : planted) {
    if (c.j < coarsest_level || c.j >= gx.levels)
      throw Error(ErrorCode::ScaleRangeTooSmall, "planted level " + std::to_string(c.j) + " is not resolved");
    if (c.k < 0 || c.k >= (1LL << c.j)) throw Error(ErrorCode::LevelOutOfRange, "planted translation out of range");
    if (c.value.size() != ny) throw Error(ErrorCode::ShapeMismatch, "planted vector does not match the y grid");
    auto row = pyr.detail(c.j).row(static_cast<std::size_t>(c.k));
    for (std::size_t m = 0; m < ny; ++m) row[m] += c.value[m];
  }
  return SampledKernel{gx, gy, inverse_dwt_columns(pyr, filter), "synthesized"};
}

double planted_seminorm(const std::vector<PlantedCoefficient>& planted, double alpha, double p,
                        const DyadicGrid& gx, const DyadicGrid& gy) {
  if (planted.empty()) return 0.0;
  int lo = planted.front().j, hi = planted.front().j;
  for (const auto& c : planted) {
    lo = std::min(lo, c.j);
    hi = std::max(hi, c.j);
  }
  std::vector<std::vector<double>> by_level(static_cast<std::size_t>(hi - lo + 1));
  for (const auto& c : planted)
    by_level[static_cast<std::size_t>(c.j - lo)].push_back(vector_norm(c.value, ValueNorm::L2, gy.spacing()));
  return besov_from_level_norms(by_level, lo, BesovParams{alpha, p, p, ValueNorm::L2}, gx.length());
}

SynthesisResult synthesize_from_coefficients(double alpha, double p, const WaveletFilter& filter,
                                             const DyadicGrid& gx, const DyadicGrid& gy, std::uint64_t seed,
                                             const SynthesisOptions& opt) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidBesovParams, "alpha must be positive");
  if (!(p > 0.0 && p <= 2.0)) throw Error(ErrorCode::InvalidBesovParams, "p must lie in (0, 2]");
  if (opt.y_modes < 1) throw Error(ErrorCode::InvalidExponent, "y_modes must be positive");
  const int finest = opt.finest_level < 0 ? gx.levels - 1 : opt.finest_level;
  if (opt.coarsest_level < 0 || finest >= gx.levels || finest < opt.coarsest_level)
    throw Error(ErrorCode::ScaleRangeTooSmall, "planted scale range [" + std::to_string(opt.coarsest_level) + ", " +
                                                   std::to_string(finest) + "] is empty or not resolved by the grid");

  SynthesisResult result;
  for (int j = opt.coarsest_level; j <= finest; ++j) {
    const double level_norm = std::pow(level_dilation(j, gx.length()), -(alpha + 0.5));
    for (long long k : candidate_translations(j, filter.support_length(), opt.confine)) {
      Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(j) << 40) | static_cast<std::uint64_t>(k)));
      const double keep = rng.uniform();
      const double xi = rng.uniform(0.5, 1.5);
      if (keep >= opt.density) continue;
      PlantedCoefficient c{j, k, random_profile(rng, gy, opt.y_modes)};
      for (double& v : c.value) v *= level_norm * xi;
      result.planted.push_back(std::move(c));
    }
  }
  if (result.planted.empty())
    throw Error(ErrorCode::ScaleRangeTooSmall, "no coefficient was planted; raise density or widen the scale range");
  result.kernel = synthesize_kernel(result.planted, filter, gx, gy, opt.coarsest_level);
  result.ground_truth = planted_seminorm(result.planted, alpha, p, gx, gy);
  return result;
}

SynthesisResult synthesize_builtin(const KernelSpec& spec, const DyadicGrid& gx, const DyadicGrid& gy) {
  const bool dense = spec.family == KernelFamily::FractionalRough;
  if (!dense && spec.family != KernelFamily::WaveletSynthetic)
    throw Error(ErrorCode::UnknownFamily, to_string(spec.family) + " is not a random family");
  if (!spec.seed) throw Error(ErrorCode::ParameterMissing, to_string(spec.family) + " needs a seed");
  const double alpha = required(spec, "alpha");
  const double p = dense ? optional(spec, "p", 1.0) : required(spec, "p");
  const WaveletFilter filter = build_filter(WaveletFamily::Daubechies, static_cast<int>(optional(spec, "order", 3)));
  SynthesisOptions opt;
  opt.coarsest_level = static_cast<int>(optional(spec, "j0", 0));
  opt.finest_level = static_cast<int>(optional(spec, "finest_level", -1));
  opt.density = optional(spec, "density", dense ? 1.0 : 0.35);
  opt.y_modes = static_cast<int>(optional(spec, "y_modes", opt.y_modes));
  opt.confine = optional(spec, "confine", 1.0) != 0.0;
  SynthesisResult r = synthesize_from_coefficients(alpha, p, filter, gx, gy, *spec.seed, opt);
  r.kernel.label = spec.label.empty() ? to_string(spec.family) : spec.label;
  return r;
}

}  // namespace besovop
