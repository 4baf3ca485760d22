#pragma once

// Finite nonnegative sequences: rearrangements, l_p and Lorentz l_{p,q}
// quasinorms, and the discrete Hardy transform.

#include <limits>
#include <span>
#include <vector>

namespace besovop {

/// Finite sequence of nonnegative reals. Construction validates the sign.
class NonnegSeq {
 public:
  NonnegSeq() = default;
  explicit NonnegSeq(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  bool is_nonincreasing() const noexcept;

  friend bool operator==(const NonnegSeq&, const NonnegSeq&) = default;

 private:
  std::vector<double> values_;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

NonnegSeq decreasing_rearrangement(const NonnegSeq& s);

/// (sum s_n^p)^{1/p}; InvalidExponent unless p > 0.
double ell_p(const NonnegSeq& s, double p);

/// Lorentz quasinorm with 0-based weights: with s* the decreasing
/// rearrangement, (sum ((n+1)^{1/p-1/q} s*_n)^q)^{1/q}, or
/// sup (n+1)^{1/p} s*_n when q is infinite. q == p reproduces ell_p.
double lorentz_pq(const NonnegSeq& s, double p, double q);

struct HardyTransform {
  NonnegSeq values;      // a_1, a_2, ... stored from index 0
  bool rearranged = false;  // input was not nonincreasing and was sorted first
};

/// a_n = n^{-r} (sum_{k=n}^{len} k^{r mu - 1} b_k^mu)^{1/mu}, 1-based, C = 1.
HardyTransform hardy_transform(const NonnegSeq& b, double r, double mu);

/// lorentz_pq(a, 1/s, q) / lorentz_pq(b, 1/s, q) for a = hardy_transform(b).
/// Requires s > r; DivisionByZero when b vanishes.
double hardy_check(const NonnegSeq& b, double r, double mu, double s, double q);

}  // namespace besovop
