#include "besovop/seqspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "besovop/error.hpp"

namespace besovop {
namespace {

void require_positive(double p, const char* name) {
  if (!(p > 0.0)) throw Error(ErrorCode::InvalidExponent, std::string(name) + " must be positive");
}

}  // namespace

NonnegSeq::NonnegSeq(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidExponent, "sequence entries must be finite and nonnegative");
}

bool NonnegSeq::is_nonincreasing() const noexcept {
  return std::is_sorted(values_.begin(), values_.end(), std::greater<>());
}

NonnegSeq decreasing_rearrangement(const NonnegSeq& s) {
  std::vector<double> v(s.values().begin(), s.values().end());
  std::stable_sort(v.begin(), v.end(), std::greater<>());
  return NonnegSeq(std::move(v));
}

double ell_p(const NonnegSeq& s, double p) {
  require_positive(p, "p");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : s.values()) m = std::max(m, v);
    return m;
  }
  // Summed in decreasing order so lorentz_pq(s, p, p) agrees bit for bit.
  const NonnegSeq sorted = decreasing_rearrangement(s);
  double sum = 0.0;
  for (double v : sorted.values()) sum += std::pow(v, p);
  return std::pow(sum, 1.0 / p);
}

double lorentz_pq(const NonnegSeq& s, double p, double q) {
  require_positive(p, "p");
  require_positive(q, "q");
  const NonnegSeq sorted = decreasing_rearrangement(s);
  const auto v = sorted.values();
  if (std::isinf(q)) {
    double m = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n)
      m = std::max(m, std::pow(static_cast<double>(n + 1), 1.0 / p) * v[n]);
    return m;
  }
  const double e = 1.0 / p - 1.0 / q;
  double sum = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    // (n+1)^e s_n, raised to q; when p == q the weight is exactly 1.
    const double w = e == 0.0 ? v[n] : std::pow(static_cast<double>(n + 1), e) * v[n];
    sum += std::pow(w, q);
  }
  return std::pow(sum, 1.0 / q);
}

HardyTransform hardy_transform(const NonnegSeq& b, double r, double mu) {
  if (b.empty()) throw Error(ErrorCode::EmptySequence, "hardy_transform needs a nonempty sequence");
  require_positive(r, "r");
  require_positive(mu, "mu");
  HardyTransform out;
  NonnegSeq sorted = b;
  if (!b.is_nonincreasing()) {
    sorted = decreasing_rearrangement(b);
    out.rearranged = true;
  }
  const auto v = sorted.values();
  const std::size_t len = v.size();
  std::vector<double> a(len);
  double tail = 0.0;
  for (std::size_t i = len; i-- > 0;) {
    const double k = static_cast<double>(i + 1);
    if (v[i] > 0.0) tail += std::pow(k, r * mu - 1.0) * std::pow(v[i], mu);
    a[i] = std::pow(k, -r) * std::pow(tail, 1.0 / mu);
  }
  out.values = NonnegSeq(std::move(a));
  return out;
}

double hardy_check(const NonnegSeq& b, double r, double mu, double s, double q) {
  if (!(s > r)) throw Error(ErrorCode::InvalidExponent, "hardy_check requires s > r");
  const double denom = lorentz_pq(b, 1.0 / s, q);
  if (denom == 0.0) throw Error(ErrorCode::DivisionByZero, "reference sequence vanishes");
  const HardyTransform a = hardy_transform(b, r, mu);
  return lorentz_pq(a.values, 1.0 / s, q) / denom;
}

}  // namespace besovop
