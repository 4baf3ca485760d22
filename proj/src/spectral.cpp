#include "besovop/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/parallel.hpp"
#include "besovop/svd.hpp"

namespace besovop {

DiscreteOperator discretize(const SampledKernel& kernel) {
  validate(kernel);
  DiscreteOperator op{kernel.values, kernel.label};
  const double w = std::sqrt(kernel.grid_x.spacing() * kernel.grid_y.spacing());
  for (double& v : op.matrix.data()) v *= w;
  return op;
}

std::size_t SingularSpectrum::rank() const noexcept {
  if (mu.empty() || mu[0] == 0.0) return 0;
  const double cut = rank_tolerance * mu[0];
  std::size_t r = 0;
  while (r < mu.size() && mu[r] > cut) ++r;
  return r;
}

SingularSpectrum make_spectrum(std::vector<double> values) {
  std::stable_sort(values.begin(), values.end(), std::greater<>());
  return SingularSpectrum{NonnegSeq(std::move(values))};
}

SingularSpectrum singular_values(const Matrix& a) { return make_spectrum(jacobi_svd(a, false).values); }

SingularSpectrum singular_values(const DiscreteOperator& op) { return singular_values(op.matrix); }

double schatten(const SingularSpectrum& s, double p) { return ell_p(s.mu, p); }

double schatten_lorentz(const SingularSpectrum& s, double p, double q) { return lorentz_pq(s.mu, p, q); }

NonnegSeq hs_approx_numbers(const SingularSpectrum& s) {
  const auto mu = s.mu.values();
  std::vector<double> e(mu.size(), 0.0);
  double tail = 0.0;
  for (std::size_t n = mu.size(); n-- > 0;) {
    e[n] = std::sqrt(tail);
    tail += mu[n] * mu[n];
  }
  return NonnegSeq(std::move(e));
}

RatioCheck check_mu_estimate(const SingularSpectrum& s) {
  if (s.size() < 3) throw Error(ErrorCode::SpectrumTooShort, "need at least three singular values");
  const NonnegSeq e = hs_approx_numbers(s);
  RatioCheck out;
  for (std::size_t n = 1; 2 * n < s.size(); ++n) {
    const double num = s.mu[2 * n] * std::sqrt(static_cast<double>(n));
    if (e[n] == 0.0) {
      // mu is nonincreasing, so a vanishing tail forces mu(2n) = 0 as well
      if (num == 0.0) out.degenerate = true;
      continue;
    }
    const double r = num / e[n];
    if (r > out.value) {
      out.value = r;
      out.worst_index = n;
    }
  }
  return out;
}

RatioCheck check_lpq_equivalence(const SingularSpectrum& s, double p, double q) {
  if (!(p > 0.0 && p < 2.0)) throw Error(ErrorCode::InvalidExponent, "p must lie in (0, 2)");
  const double denom = schatten_lorentz(s, p, q);
  if (denom == 0.0) throw Error(ErrorCode::ZeroSpectrum, "spectrum vanishes");
  const NonnegSeq e = hs_approx_numbers(s);
  std::vector<double> w(e.size());
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = e[n] / std::sqrt(static_cast<double>(n + 1));
  RatioCheck out;
  out.value = lorentz_pq(NonnegSeq(std::move(w)), p, q) / denom;
  out.degenerate = out.value == 0.0;
  return out;
}

EmbeddingReport verify_main_embedding(const std::vector<SampledKernel>& kernels, const WaveletFilter& filter, double p,
                                      int coarsest_level) {
  if (!(p > 0.0 && p < 2.0)) throw Error(ErrorCode::InvalidBesovParams, "p must lie in (0, 2)");
  EmbeddingReport report;
  report.p = p;
  report.cases.resize(kernels.size());
  parallel_for(kernels.size(), [&](std::size_t i) {
    const SampledKernel& k = kernels[i];
    EmbeddingCase c;
    c.label = k.label;
    c.l2_norm = k.l2_norm();
    if (c.l2_norm == 0.0) throw Error(ErrorCode::ZeroKernel, "kernel '" + k.label + "' vanishes");
    c.lhs = schatten(singular_values(discretize(k)), p);
    const CoefficientField field = analyze_kernel(k, filter, coarsest_level);
    c.seminorm = besov_seminorm(field, BesovParams{1.0 / p - 0.5, p, p, ValueNorm::L2});
    c.rhs = c.l2_norm + c.seminorm;
    c.ratio = c.lhs / c.rhs;
    report.cases[i] = std::move(c);
  });
  for (const auto& c : report.cases) report.max_ratio = std::max(report.max_ratio, c.ratio);
  return report;
}

FitRange middle_decade(std::size_t length) {
  const double centre = std::sqrt(static_cast<double>(length));
  const double root10 = std::sqrt(10.0);
  FitRange r;
  r.first = static_cast<std::size_t>(std::floor(centre / root10));
  r.last = std::min(length, static_cast<std::size_t>(std::ceil(centre * root10)) + 1);
  return r;
}

double decay_rate(const SingularSpectrum& s, FitRange range) {
  if (range.last > s.size() || range.first + 2 > range.last)
    throw Error(ErrorCode::SpectrumTooShort, "fit range [" + std::to_string(range.first) + ", " +
                                                 std::to_string(range.last) + ") does not fit the spectrum");
  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(range.last - range.first);
  for (std::size_t i = range.first; i < range.last; ++i) {
    if (!(s.mu[i] > 0.0))
      throw Error(ErrorCode::NonpositiveValuesInRange, "mu(" + std::to_string(i) + ") is not positive");
    sx += std::log(static_cast<double>(i + 1));
    sy += std::log(s.mu[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = range.first; i < range.last; ++i) {
    const double dx = std::log(static_cast<double>(i + 1)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(s.mu[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace besovop
