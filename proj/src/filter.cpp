#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "besovop/error.hpp"
#include "besovop/wavelet.hpp"

namespace besovop {
namespace {

using cplx = std::complex<double>;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

cplx horner(const std::vector<double>& coeffs, cplx z) {
  // coeffs in ascending powers
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

cplx horner_derivative(const std::vector<double>& coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t i = coeffs.size() - 1; i >= 1; --i) acc = acc * z + static_cast<double>(i) * coeffs[i];
  return acc;
}

// Durand-Kerner iteration on the monic polynomial, then a few Newton steps
// against the original coefficients. Starting points are fixed so the
// result is deterministic.
std::vector<cplx> polynomial_roots(const std::vector<double>& coeffs) {
  const std::size_t degree = coeffs.size() - 1;
  std::vector<cplx> roots(degree);
  if (degree == 0) return roots;
  const double lead = coeffs.back();
  std::vector<double> monic(coeffs);
  for (double& c : monic) c /= lead;

  const cplx seed(0.4, 0.9);
  cplx power = 1.0;
  for (auto& r : roots) {
    r = power;
    power *= seed;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < degree; ++i) {
      cplx denom = 1.0;
      for (std::size_t j = 0; j < degree; ++j)
        if (j != i) denom *= roots[i] - roots[j];
      const cplx delta = horner(monic, roots[i]) / denom;
      roots[i] -= delta;
      change = std::max(change, std::abs(delta) / std::max(1.0, std::abs(roots[i])));
    }
    if (change < 1e-15) break;
  }
  for (auto& r : roots) {
    for (int k = 0; k < 3; ++k) {
      const cplx d = horner_derivative(coeffs, r);
      if (std::abs(d) == 0.0) break;
      r -= horner(coeffs, r) / d;
    }
  }
  return roots;
}

std::vector<cplx> multiply(const std::vector<cplx>& p, const std::vector<cplx>& q) {
  std::vector<cplx> r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

std::vector<double> daubechies_lowpass(int n) {
  // Q(y) = sum_{k<n} C(n-1+k, k) y^k with y = sin^2(w/2) = (2 - z - 1/z)/4.
  std::vector<double> q(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) q[static_cast<std::size_t>(k)] = binomial(n - 1 + k, k);

  std::vector<cplx> poly{1.0};
  for (int i = 0; i < n; ++i) poly = multiply(poly, {1.0, 1.0});  // (1 + z)^n

  for (const cplx& y : polynomial_roots(q)) {
    // z + 1/z = 2 - 4y; keep the root outside the unit circle so the
    // filter energy sits at the start (minimum phase in z^{-1}).
    const cplx c = 1.0 - 2.0 * y;
    const cplx disc = std::sqrt(c * c - 1.0);
    cplx z = c + disc;
    if (std::abs(z) < 1.0) z = c - disc;
    poly = multiply(poly, {-z, 1.0});
  }

  std::vector<double> h(poly.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    h[i] = poly[i].real();
    sum += h[i];
  }
  for (double& v : h) v *= std::numbers::sqrt2 / sum;
  return h;
}

}  // namespace

std::string WaveletFilter::label() const {
  if (vanishing_moments == 1 && family_name == "haar") return "haar";
  return "daubechies:" + std::to_string(vanishing_moments);
}

WaveletFilter build_filter(WaveletFamily family, int vanishing_moments) {
  if (family == WaveletFamily::Haar && vanishing_moments != 1)
    throw Error(ErrorCode::UnsupportedOrder, "haar has exactly one vanishing moment");
  if (vanishing_moments < 1 || vanishing_moments > kMaxVanishingMoments)
    throw Error(ErrorCode::UnsupportedOrder,
                "vanishing moments must lie in [1, " + std::to_string(kMaxVanishingMoments) + "], got " +
                    std::to_string(vanishing_moments));

  WaveletFilter f;
  f.family_name = family == WaveletFamily::Haar ? "haar" : "daubechies";
  f.vanishing_moments = vanishing_moments;
  if (vanishing_moments == 1) {
    f.lowpass = {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
  } else {
    f.lowpass = daubechies_lowpass(vanishing_moments);
  }
  const std::size_t len = f.lowpass.size();
  f.highpass.resize(len);
  for (std::size_t k = 0; k < len; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    f.highpass[k] = sign * f.lowpass[len - 1 - k];
  }
  return f;
}

WaveletFilter parse_filter(std::string_view spec) {
  if (spec == "haar") return build_filter(WaveletFamily::Haar, 1);
  std::string_view digits;
  if (spec.starts_with("daubechies:"))
    digits = spec.substr(11);
  else if (spec.starts_with("db"))
    digits = spec.substr(2);
  else
    throw Error(ErrorCode::UnknownFamily, "unknown filter '" + std::string(spec) + "'");
  int n = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size())
    throw Error(ErrorCode::UnknownFamily, "bad filter order in '" + std::string(spec) + "'");
  return build_filter(WaveletFamily::Daubechies, n);
}

}  // namespace besovop
