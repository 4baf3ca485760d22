#include "besovop/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "besovop/error.hpp"
#include "besovop/simd.hpp"

namespace besovop {

void BesovParams::validate() const {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidBesovParams, "p must be positive");
  if (!(q > 0.0)) throw Error(ErrorCode::InvalidBesovParams, "q must be positive");
  const double floor = std::max(1.0 / p - 1.0, 0.0);
  if (!(s > floor))
    throw Error(ErrorCode::InvalidBesovParams,
                "smoothness " + std::to_string(s) + " must exceed max(1/p - 1, 0) = " + std::to_string(floor));
}

std::size_t CoefficientField::entry_count() const noexcept {
  std::size_t n = 0;
  for (const Matrix& d : details) n += d.rows();
  return n;
}

double CoefficientField::energy() const {
  double e = simd::sum_squares(scaling.data());
  for (const Matrix& d : details) e += simd::sum_squares(d.data());
  return e * y_spacing();
}

CoefficientField analyze_kernel(const SampledKernel& kernel, const WaveletFilter& filter, int coarsest_level) {
  validate(kernel);
  WaveletPyramid pyr = to_continuum(forward_dwt_columns(kernel.values, filter, coarsest_level), kernel.grid_x.spacing());
  CoefficientField f;
  f.coarsest_level = pyr.coarsest_level;
  f.levels = pyr.levels;
  f.filter = filter;
  f.grid_x = kernel.grid_x;
  f.grid_y = kernel.grid_y;
  f.scaling = std::move(pyr.scaling);
  f.details = std::move(pyr.details);
  return f;
}

Matrix synthesize_field(const CoefficientField& field) {
  WaveletPyramid pyr;
  pyr.coarsest_level = field.coarsest_level;
  pyr.levels = field.levels;
  pyr.scaling = field.scaling;
  pyr.details = field.details;
  pyr.normalization = Normalization::Continuum;
  pyr.spacing = field.grid_x.spacing();
  return inverse_dwt_columns(pyr, field.filter);
}

double vector_norm(std::span<const double> v, ValueNorm norm, double spacing) {
  if (norm == ValueNorm::Linf) return simd::max_abs(v);
  return std::sqrt(spacing * simd::sum_squares(v));
}

std::vector<CoefficientNorm> coefficient_norms(const CoefficientField& field, ValueNorm norm) {
  std::vector<CoefficientNorm> out;
  out.reserve(field.entry_count());
  for (int j = field.coarsest_level; j < field.levels; ++j) {
    const Matrix& d = field.detail(j);
    for (std::size_t k = 0; k < d.rows(); ++k)
      out.push_back({j, static_cast<long long>(k), vector_norm(d.row(k), norm, field.y_spacing())});
  }
  return out;
}

double besov_from_level_norms(std::span<const std::vector<double>> norms_by_level, int coarsest_level,
                              const BesovParams& params, double box_length) {
  params.validate();
  const double exponent = params.s + 0.5 - 1.0 / params.p;
  auto weight = [&](std::size_t i) {
    return exponent == 0.0 ? 1.0
                           : std::pow(level_dilation(coarsest_level + static_cast<int>(i), box_length), exponent);
  };
  if (params.q == params.p) {
    std::vector<double> pooled;
    for (std::size_t i = 0; i < norms_by_level.size(); ++i) {
      const double w = weight(i);
      for (double v : norms_by_level[i]) pooled.push_back(w == 1.0 ? v : w * v);
    }
    return ell_p(NonnegSeq(std::move(pooled)), params.p);
  }
  std::vector<double> per_level;
  for (std::size_t i = 0; i < norms_by_level.size(); ++i)
    per_level.push_back(weight(i) * ell_p(NonnegSeq(norms_by_level[i]), params.p));
  return ell_p(NonnegSeq(std::move(per_level)), params.q);
}

double besov_seminorm(const CoefficientField& field, const BesovParams& params) {
  params.validate();
  std::vector<std::vector<double>> by_level;
  for (int j = field.coarsest_level; j < field.levels; ++j) {
    const Matrix& d = field.detail(j);
    std::vector<double> norms(d.rows());
    for (std::size_t k = 0; k < d.rows(); ++k) norms[k] = vector_norm(d.row(k), params.value_norm, field.y_spacing());
    by_level.push_back(std::move(norms));
  }
  return besov_from_level_norms(by_level, field.coarsest_level, params, field.grid_x.length());
}

CoefficientField greedy_n_term(const CoefficientField& field, std::size_t n, ValueNorm norm) {
  auto norms = coefficient_norms(field, norm);
  // coefficient_norms is already in (j, k) order, so a stable sort keeps the
  // lexicographic tie-break.
  std::stable_sort(norms.begin(), norms.end(),
                   [](const CoefficientNorm& a, const CoefficientNorm& b) { return a.norm > b.norm; });
  CoefficientField out = field;
  for (Matrix& d : out.details) d = Matrix(d.rows(), d.cols());
  for (std::size_t i = 0; i < std::min(n, norms.size()); ++i) {
    const auto src = field.detail(norms[i].j).row(static_cast<std::size_t>(norms[i].k));
    auto dst = out.detail(norms[i].j).row(static_cast<std::size_t>(norms[i].k));
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return out;
}

NonnegSeq approx_numbers(const CoefficientField& field) {
  std::vector<double> b;
  for (const auto& c : coefficient_norms(field, ValueNorm::L2)) b.push_back(c.norm);
  std::stable_sort(b.begin(), b.end(), std::greater<>());
  std::vector<double> e(b.size(), 0.0);
  double tail = 0.0;
  // accumulate from the smallest term up
  for (std::size_t n = b.size(); n-- > 0;) {
    e[n] = std::sqrt(tail);
    tail += b[n] * b[n];
  }
  return NonnegSeq(std::move(e));
}

double approx_space_quasinorm(const NonnegSeq& errors, double alpha, double q) {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidExponent, "alpha must be positive");
  return lorentz_pq(errors, 1.0 / alpha, q);
}

NonlinearReport verify_nonlinear_equivalence(const SampledKernel& kernel, const WaveletFilter& filter, double p,
                                             int coarsest_level) {
  if (!(p > 0.0 && p < 2.0))
    throw Error(ErrorCode::InvalidBesovParams, "the n-term characterization needs 0 < p < 2 (alpha = 1/p - 1/2 > 0)");
  NonlinearReport r;
  r.p = p;
  r.alpha = 1.0 / p - 0.5;
  r.l2_norm = kernel.l2_norm();
  if (r.l2_norm == 0.0) throw Error(ErrorCode::ZeroKernel, "kernel '" + kernel.label + "' vanishes");
  const CoefficientField field = analyze_kernel(kernel, filter, coarsest_level);

  // Errors indexed from the zero approximant: E(0) = ||k||, then the best
  // n-term errors for n = 1, 2, ...
  const NonnegSeq tail = approx_numbers(field);
  std::vector<double> errors{r.l2_norm};
  errors.insert(errors.end(), tail.values().begin(), tail.values().end());
  r.approx_quasinorm = approx_space_quasinorm(NonnegSeq(std::move(errors)), r.alpha, p);

  r.seminorm = besov_seminorm(field, BesovParams{r.alpha, p, p, ValueNorm::L2});
  r.rhs = r.l2_norm + r.seminorm;
  r.ratio = r.approx_quasinorm / r.rhs;
  std::vector<double> b;
  for (const auto& c : coefficient_norms(field, ValueNorm::L2)) b.push_back(c.norm);
  r.coefficient_ell_p = ell_p(NonnegSeq(std::move(b)), p);
  return r;
}

}  // namespace besovop
