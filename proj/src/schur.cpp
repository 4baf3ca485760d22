#include "besovop/schur.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/parallel.hpp"
#include "besovop/random.hpp"
#include "besovop/seqspace.hpp"
#include "besovop/simd.hpp"
#include "besovop/svd.hpp"

namespace besovop {
namespace {

void require_p(double p, double upper, bool inclusive) {
  const bool ok = p > 0.0 && (inclusive ? p <= upper : p < upper);
  if (!ok)
    throw Error(ErrorCode::InvalidExponent, "p = " + std::to_string(p) + " outside (0, " + std::to_string(upper) +
                                                (inclusive ? "]" : ")"));
}

double tau_of(double p) { return std::min(p, 1.0); }

// (sum v^tau)^{1/tau}
double tau_sum(const std::vector<double>& v, double tau) {
  double s = 0.0;
  for (double x : v) s += std::pow(x, tau);
  return std::pow(s, 1.0 / tau);
}

Matrix scaled(const Matrix& k, const std::vector<double>& u, const std::vector<double>& v) {
  Matrix m = k;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    simd::hadamard(row, v, row);
    simd::scale(u[i], row);
  }
  return m;
}

// Singular values below this fraction of the largest are rounding noise. For
// p < 1 the quasinorm would amplify them (1e-16 becomes 1e-8 at p = 1/2).
constexpr double kNoiseFloor = 1e-13;

std::vector<double> above_noise(std::vector<double> sigma) {
  if (sigma.empty()) return sigma;
  const double cut = kNoiseFloor * sigma.front();
  sigma.erase(std::find_if(sigma.begin(), sigma.end(), [cut](double x) { return x <= cut; }), sigma.end());
  return sigma;
}

void normalize(std::vector<double>& x) {
  const double n = std::sqrt(simd::sum_squares(x));
  if (n > 0.0) simd::scale(1.0 / n, x);
}

std::vector<double> gaussian_unit(Rng& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& e : x) e = rng.normal();
  normalize(x);
  return x;
}

// Gradient of sum sigma^p (up to the factor p) with respect to u and v.
void objective_gradient(const Matrix& k, const std::vector<double>& u, const std::vector<double>& v, double p,
                        std::vector<double>& gu, std::vector<double>& gv) {
  const SvdResult svd = jacobi_svd(scaled(k, u, v), true);
  const std::size_t nr = k.rows(), nc = k.cols();
  Matrix h(nr, nc);
  const double top = svd.values.empty() ? 0.0 : svd.values[0];
  for (std::size_t r = 0; r < svd.values.size(); ++r) {
    const double s = svd.values[r];
    if (!(s > 1e-12 * top)) break;
    const double w = std::pow(s, p - 1.0);
    for (std::size_t i = 0; i < nr; ++i) {
      const double a = w * svd.u(i, r);
      for (std::size_t m = 0; m < nc; ++m) h(i, m) += a * svd.v(m, r);
    }
  }
  for (std::size_t i = 0; i < nr; ++i) simd::hadamard(h.row(i), k.row(i), h.row(i));
  gu.assign(nr, 0.0);
  gv.assign(nc, 0.0);
  for (std::size_t i = 0; i < nr; ++i) {
    gu[i] = simd::dot(h.row(i), v);
    simd::axpy(u[i], h.row(i), gv);
  }
}

// One projected-gradient step on x (u when on_u, else v). Returns true when
// an improving point was found.
bool ascent_half_step(const Matrix& k, double p, std::vector<double>& u, std::vector<double>& v, bool on_u,
                      double& value, double& step) {
  std::vector<double> gu, gv;
  objective_gradient(k, u, v, p, gu, gv);
  std::vector<double>& x = on_u ? u : v;
  std::vector<double>& g = on_u ? gu : gv;
  const double radial = simd::dot(g, x);
  simd::axpy(-radial, x, g);
  const double gn = std::sqrt(simd::sum_squares(g));
  if (!(gn > 1e-14 * (std::abs(radial) + 1e-300))) return false;
  simd::scale(1.0 / gn, g);
  double t = step;
  for (int attempt = 0; attempt < 12; ++attempt, t *= 0.5) {
    std::vector<double> cand = x;
    simd::axpy(t, g, cand);
    normalize(cand);
    const double f = on_u ? rank_one_objective(k, cand, v, p) : rank_one_objective(k, u, cand, p);
    if (f > value) {
      x = std::move(cand);
      value = f;
      step = std::min(1.0, 1.5 * t);
      return true;
    }
  }
  step = t;
  return false;
}

struct Candidate {
  double value = 0.0;
  std::vector<double> u, v;
};

Candidate run_start(const Matrix& k, double p, std::size_t index, std::size_t steps, std::uint64_t seed) {
  const std::size_t nr = k.rows(), nc = k.cols();
  Candidate c;
  if (index == 0) {
    c.u.assign(nr, 1.0 / std::sqrt(static_cast<double>(nr)));
    c.v.assign(nc, 1.0 / std::sqrt(static_cast<double>(nc)));
  } else if (index == 1) {
    std::size_t bi = 0, bm = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t m = 0; m < nc; ++m)
        if (std::abs(k(i, m)) > best) {
          best = std::abs(k(i, m));
          bi = i;
          bm = m;
        }
    c.u.assign(nr, 0.0);
    c.v.assign(nc, 0.0);
    c.u[bi] = 1.0;
    c.v[bm] = 1.0;
  } else {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(index)));
    c.u = gaussian_unit(rng, nr);
    c.v = gaussian_unit(rng, nc);
  }
  c.value = rank_one_objective(k, c.u, c.v, p);
  if (c.value == 0.0) return c;
  double step_u = 0.5, step_v = 0.5;
  for (std::size_t s = 0; s < steps; ++s) {
    const bool moved_u = ascent_half_step(k, p, c.u, c.v, true, c.value, step_u);
    const bool moved_v = ascent_half_step(k, p, c.u, c.v, false, c.value, step_v);
    if (!moved_u && !moved_v && step_u < 1e-9 && step_v < 1e-9) break;
  }
  return c;
}

// Cyclic length of the smallest arc holding every nonzero entry.
std::size_t cyclic_support(std::span<const double> x) {
  const std::size_t n = x.size();
  std::size_t longest_gap = 0, run = 0;
  bool any = false;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    if (x[i % n] == 0.0) {
      run = std::min(run + 1, n);
      longest_gap = std::max(longest_gap, run);
    } else {
      any = true;
      run = 0;
    }
  }
  return any ? n - longest_gap : 0;
}

// Synthesis atoms of one level: row l = unit coefficient at translation l
// pushed through the inverse transform, in continuum units.
Matrix level_atoms(const WaveletFilter& filter, int levels, int coarsest_level, int j, bool scaling, double hx) {
  const std::size_t count = std::size_t{1} << j;
  WaveletPyramid pyr;
  pyr.coarsest_level = coarsest_level;
  pyr.levels = levels;
  pyr.scaling = Matrix(std::size_t{1} << coarsest_level, count);
  for (int jj = coarsest_level; jj < levels; ++jj) pyr.details.emplace_back(std::size_t{1} << jj, count);
  Matrix& block = scaling ? pyr.scaling : pyr.detail(j);
  for (std::size_t l = 0; l < count; ++l) block(l, l) = 1.0;
  pyr.normalization = Normalization::Continuum;
  pyr.spacing = hx;
  return inverse_dwt_columns(pyr, filter).transposed();
}

struct LevelTerms {
  std::vector<double> products;  // |atom_l|_inf |k_{j,l}|_inf
  double atom_sup = 0.0;
};

LevelTerms level_terms(const SliceLevel& s) {
  LevelTerms t;
  for (std::size_t l = 0; l < s.atoms.rows(); ++l) {
    const double a = simd::max_abs(s.atoms.row(l));
    t.atom_sup = std::max(t.atom_sup, a);
    t.products.push_back(a * simd::max_abs(s.coefficients.row(l)));
  }
  return t;
}

// l_{p♭} inside each class of disjoint atoms, tau-sum across classes.
double level_bound(const SliceLevel& s, const LevelTerms& t, double p) {
  std::vector<double> per_class;
  for (std::size_t c = 0; c < s.classes; ++c) {
    std::vector<double> members;
    for (std::size_t l = c; l < t.products.size(); l += s.classes) members.push_back(t.products[l]);
    per_class.push_back(aggregate_strips(members, p));
  }
  return tau_sum(per_class, tau_of(p));
}

}  // namespace

SchurSymbol SchurSymbol::from_kernel(SampledKernel kernel) {
  validate(kernel);
  SchurSymbol s;
  s.values_ = kernel.values;
  s.bounded_norm_ = kernel.sup_norm();
  s.kernel_ = std::move(kernel);
  return s;
}

SchurSymbol SchurSymbol::from_matrix(Matrix a) {
  if (a.rows() != a.cols() || a.empty()) throw Error(ErrorCode::ShapeMismatch, "matrix symbols must be square");
  SchurSymbol s;
  s.bounded_norm_ = simd::max_abs(a.data());
  s.values_ = std::move(a);
  return s;
}

double SchurSymbol::row_coordinate(std::size_t i) const noexcept {
  return kernel_ ? kernel_->grid_x.point(i) : static_cast<double>(i);
}

double p_flat(double p) { return p >= 2.0 ? kInfinity : 2.0 * p / (2.0 - p); }

Matrix apply_multiplier(const SchurSymbol& k, const Matrix& phi) {
  const Matrix& a = k.values();
  if (a.rows() != phi.rows() || a.cols() != phi.cols())
    throw Error(ErrorCode::ShapeMismatch, "symbol and operator shapes differ");
  Matrix out(a.rows(), a.cols());
  simd::hadamard(a.data(), phi.data(), out.data());
  return out;
}

SampledKernel apply_multiplier(const SchurSymbol& k, const SampledKernel& phi) {
  if (const SampledKernel* sk = k.kernel(); sk && (sk->grid_x != phi.grid_x || sk->grid_y != phi.grid_y))
    throw Error(ErrorCode::ShapeMismatch, "symbol and kernel grids differ");
  SampledKernel out = phi;
  out.values = apply_multiplier(k, phi.values);
  return out;
}

double rank_one_objective(const Matrix& k, const std::vector<double>& u, const std::vector<double>& v, double p) {
  return ell_p(NonnegSeq(above_noise(jacobi_svd(scaled(k, u, v), false).values)), p);
}

RankOneBound rank_one_lower_bound(const SchurSymbol& k, double p, std::size_t samples, std::size_t ascent_steps,
                                  std::uint64_t seed) {
  require_p(p, 2.0, true);
  if (samples == 0) samples = 1;
  std::vector<Candidate> results(samples);
  parallel_for(samples, [&](std::size_t i) { results[i] = run_start(k.values(), p, i, ascent_steps, seed); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples; ++i)
    if (results[i].value > results[best].value) best = i;
  RankOneBound out;
  out.value = results[best].value;
  out.xi = std::move(results[best].u);
  out.eta = std::move(results[best].v);
  out.best_sample = best;
  out.heuristic = p > 1.0;
  out.seed = seed;
  return out;
}

double factorization_bound(const Matrix& k, double p) {
  require_p(p, 2.0, true);
  if (k.empty()) return 0.0;
  const SvdResult svd = jacobi_svd(k, true);
  std::vector<double> terms;
  for (std::size_t r = 0; r < svd.values.size(); ++r) {
    if (svd.values[r] <= kNoiseFloor * svd.values[0]) break;
    double au = 0.0, av = 0.0;
    for (std::size_t i = 0; i < svd.u.rows(); ++i) au = std::max(au, std::abs(svd.u(i, r)));
    for (std::size_t m = 0; m < svd.v.rows(); ++m) av = std::max(av, std::abs(svd.v(m, r)));
    terms.push_back(svd.values[r] * au * av);
  }
  return tau_sum(terms, tau_of(p));
}

double aggregate_strips(const std::vector<double>& values, double p) {
  require_p(p, 2.0, true);
  return ell_p(NonnegSeq(values), p_flat(p));
}

PartitionBound partition_upper_bound(const SchurSymbol& k, const std::vector<double>& breakpoints, double p) {
  require_p(p, 2.0, true);
  if (breakpoints.size() < 2) throw Error(ErrorCode::EmptyPartition, "a partition needs at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()) ||
      std::adjacent_find(breakpoints.begin(), breakpoints.end()) != breakpoints.end())
    throw Error(ErrorCode::EmptyPartition, "breakpoints must be strictly increasing");
  const Matrix& a = k.values();
  const std::size_t rows = a.rows();
  if (k.row_coordinate(0) < breakpoints.front() || k.row_coordinate(rows - 1) >= breakpoints.back())
    throw Error(ErrorCode::EmptyPartition, "breakpoints do not cover the row domain");

  PartitionBound out;
  std::size_t i = 0;
  for (std::size_t r = 0; r + 1 < breakpoints.size(); ++r) {
    StripBound s;
    s.first_row = i;
    while (i < rows && k.row_coordinate(i) < breakpoints[r + 1]) ++i;
    s.last_row = i;
    Matrix block(s.last_row - s.first_row, a.cols());
    for (std::size_t row = s.first_row; row < s.last_row; ++row)
      std::copy(a.row(row).begin(), a.row(row).end(), block.row(row - s.first_row).begin());
    if (block.empty()) {
      s.method = "product_form";
    } else {
      const SvdResult svd = jacobi_svd(block, false);
      const bool rank_one = svd.values.size() < 2 || svd.values[1] <= 1e-12 * svd.values[0];
      s.value = factorization_bound(block, p);
      s.method = rank_one ? "product_form" : "factorization";
      if (p == 2.0) {
        const double sup = simd::max_abs(block.data());
        if (sup < s.value) {
          s.value = sup;
          s.method = "sup_norm";
        }
      }
    }
    out.strips.push_back(std::move(s));
  }
  std::vector<double> values;
  for (const auto& s : out.strips) values.push_back(s.value);
  out.value = aggregate_strips(values, p);
  return out;
}

std::vector<double> uniform_breakpoints(const SchurSymbol& k, std::size_t count) {
  if (count == 0) throw Error(ErrorCode::EmptyPartition, "strip count must be positive");
  double lo, hi;
  if (const SampledKernel* sk = k.kernel()) {
    lo = sk->grid_x.a;
    hi = sk->grid_x.b;
  } else {
    lo = 0.0;
    hi = static_cast<double>(k.values().rows());
  }
  std::vector<double> b(count + 1);
  for (std::size_t r = 0; r <= count; ++r) b[r] = lo + (hi - lo) * static_cast<double>(r) / static_cast<double>(count);
  b.back() = hi;
  return b;
}

std::vector<SliceLevel> wavelet_slices(const SampledKernel& k, const WaveletFilter& filter, int coarsest_level) {
  const CoefficientField field = analyze_kernel(k, filter, coarsest_level);
  const double hx = k.grid_x.spacing();
  const std::size_t nx = k.grid_x.point_count();
  std::vector<SliceLevel> out;
  auto add = [&](int j, bool scaling, const Matrix& coefficients) {
    SliceLevel s;
    s.j = j;
    s.scaling = scaling;
    s.atoms = level_atoms(filter, field.levels, field.coarsest_level, j, scaling, hx);
    s.coefficients = coefficients;
    const std::size_t count = std::size_t{1} << j;
    const std::size_t shift = nx / count;
    const std::size_t support = cyclic_support(s.atoms.row(0));
    std::size_t classes = 1;
    while (classes < count && classes * shift < support) classes *= 2;
    s.classes = classes;
    out.push_back(std::move(s));
  };
  add(field.coarsest_level, true, field.scaling);
  for (int j = field.coarsest_level; j < field.levels; ++j) add(j, false, field.detail(j));
  return out;
}

Matrix reconstruct_slices(const std::vector<SliceLevel>& slices) {
  if (slices.empty()) return {};
  Matrix out(slices.front().atoms.cols(), slices.front().coefficients.cols());
  for (const auto& s : slices)
    for (std::size_t l = 0; l < s.atoms.rows(); ++l)
      for (std::size_t i = 0; i < out.rows(); ++i)
        if (const double a = s.atoms(l, i); a != 0.0) simd::axpy(a, s.coefficients.row(l), out.row(i));
  return out;
}

SliceBound wavelet_slice_bound(const SampledKernel& k, const WaveletFilter& filter, double p, int coarsest_level) {
  require_p(p, 2.0, false);
  const double tau = tau_of(p);
  const double inv_flat = 1.0 / p_flat(p);
  SliceBound out;
  std::vector<double> parts;
  for (const SliceLevel& s : wavelet_slices(k, filter, coarsest_level)) {
    const LevelTerms t = level_terms(s);
    const double v = level_bound(s, t, p);
    if (s.scaling) {
      out.scaling_part = v;
    } else {
      out.level_values.push_back(v);
      const double c = std::pow(static_cast<double>(s.classes), 1.0 / tau - inv_flat) * t.atom_sup /
                       std::sqrt(level_dilation(s.j, k.grid_x.length()));
      out.constant = std::max(out.constant, c);
    }
    parts.push_back(v);
  }
  out.value = tau_sum(parts, tau);
  return out;
}

double SchurReport::min_upper() const noexcept {
  return std::min({partition.value, wavelet_slice.value, besov_upper});
}

SchurReport besov_schur_estimate(const SampledKernel& k, const WaveletFilter& filter, double p,
                                 const SchurOptions& options) {
  require_p(p, 2.0, false);
  const SchurSymbol symbol = SchurSymbol::from_kernel(k);
  SchurReport r;
  r.label = k.label;
  r.p = p;
  r.seed = options.seed;
  r.bounded_norm = symbol.bounded_norm();
  r.heuristic = p > 1.0;
  r.lower = rank_one_lower_bound(symbol, p, options.samples, options.ascent_steps, options.seed);
  r.partition = partition_upper_bound(symbol, uniform_breakpoints(symbol, options.strips), p);
  r.wavelet_slice = wavelet_slice_bound(k, filter, p, options.coarsest_level);

  const double flat = p_flat(p);
  const double tau = tau_of(p);
  const CoefficientField field = analyze_kernel(k, filter, options.coarsest_level);
  r.seminorm = besov_seminorm(field, BesovParams{1.0 / flat, flat, p, ValueNorm::Linf});
  r.rhs = r.seminorm + r.bounded_norm;
  const double semi_tau =
      tau == p ? r.seminorm : besov_seminorm(field, BesovParams{1.0 / flat, flat, tau, ValueNorm::Linf});
  r.besov_upper = tau_sum({r.wavelet_slice.scaling_part, r.wavelet_slice.constant * semi_tau}, tau);
  r.empirical_constant = r.rhs > 0.0 ? r.lower.value / r.rhs : 0.0;
  r.consistent = r.lower.value <= r.min_upper() + kSchurSoundnessTolerance;
  return r;
}

OracleResult matrix_mp_oracle(const Matrix& a, double p, std::size_t starts, std::uint64_t seed) {
  require_p(p, 2.0, true);
  if (a.rows() > kOracleMaxDimension || a.cols() > kOracleMaxDimension)
    throw Error(ErrorCode::MatrixTooLarge, "oracle supports at most 8 x 8 matrices");
  if (a.empty()) throw Error(ErrorCode::ShapeMismatch, "empty matrix");
  if (starts == 0) starts = 1;

  // Coordinate search over plane rotations of u and v with a shrinking angle.
  auto search = [&](std::vector<double> u, std::vector<double> v) {
    double best = rank_one_objective(a, u, v, p);
    for (double theta = 0.5; theta > 1e-7; theta *= 0.5) {
      for (int pass = 0; pass < 40; ++pass) {
        bool improved = false;
        for (int which = 0; which < 2; ++which) {
          std::vector<double>& x = which == 0 ? u : v;
          for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t m = i + 1; m < x.size(); ++m)
              for (double sgn : {1.0, -1.0}) {
                const double c = std::cos(sgn * theta), s = std::sin(sgn * theta);
                const double xi = x[i], xm = x[m];
                x[i] = c * xi - s * xm;
                x[m] = s * xi + c * xm;
                const double f = rank_one_objective(a, u, v, p);
                if (f > best * (1.0 + 1e-15)) {
                  best = f;
                  improved = true;
                } else {
                  x[i] = xi;
                  x[m] = xm;
                }
              }
        }
        if (!improved) break;
      }
    }
    return best;
  };

  OracleResult out;
  for (int batch = 0; batch < 2; ++batch) {
    const std::uint64_t batch_seed = derive_seed(seed, batch == 0 ? "oracle-batch-0" : "oracle-batch-1");
    std::vector<double> values(starts);
    parallel_for(starts, [&](std::size_t i) {
      Rng rng(derive_seed(batch_seed, static_cast<std::uint64_t>(i)));
      std::vector<double> u = gaussian_unit(rng, a.rows());
      std::vector<double> v = gaussian_unit(rng, a.cols());
      values[i] = search(std::move(u), std::move(v));
    });
    out.batch_values[batch] = *std::max_element(values.begin(), values.end());
  }
  out.value = std::max(out.batch_values[0], out.batch_values[1]);
  out.spread = out.value > 0.0 ? std::abs(out.batch_values[0] - out.batch_values[1]) / out.value : 0.0;
  return out;
}

}  // namespace besovop
