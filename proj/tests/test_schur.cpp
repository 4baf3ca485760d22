#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "besovop/besov.hpp"
#include "besovop/error.hpp"
#include "besovop/schur.hpp"
#include "besovop/spectral.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace besovop;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::FormatError;
}

// Schatten p-quasinorm of a 2 x 2 matrix from its Frobenius norm and
// determinant: sigma^2 = (F^2 +- sqrt(F^4 - 4 det^2)) / 2.
double schatten_2x2(double a, double b, double c, double d, double p) {
  const double f2 = a * a + b * b + c * c + d * d;
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * det * det));
  const double s1 = std::sqrt((f2 + disc) / 2.0), s2 = std::sqrt(std::max(0.0, (f2 - disc) / 2.0));
  return std::pow(std::pow(s1, p) + std::pow(s2, p), 1.0 / p);
}

// Dense grid over the angles of u = (cos a, sin a), v = (cos b, sin b).
double grid_search_2x2(const double m[4], double p) {
  const int n = 1500;
  double best = 0.0;
  for (int ia = 0; ia < n; ++ia) {
    const double a = std::numbers::pi * ia / n, ca = std::cos(a), sa = std::sin(a);
    for (int ib = 0; ib < n; ++ib) {
      const double b = std::numbers::pi * ib / n, cb = std::cos(b), sb = std::sin(b);
      best = std::max(best, schatten_2x2(m[0] * ca * cb, m[1] * ca * sb, m[2] * sa * cb, m[3] * sa * sb, p));
    }
  }
  return best;
}

Matrix from_values(std::size_t n, std::initializer_list<double> v) {
  Matrix a(n, n);
  std::copy(v.begin(), v.end(), a.data().begin());
  return a;
}

SampledKernel constant_kernel(const DyadicGrid& g, double c) {
  return SampledKernel{g, g, Matrix(g.point_count(), g.point_count(), c), "constant"};
}

SampledKernel synthesized(std::uint64_t seed, int levels) {
  const DyadicGrid g{levels, 0.0, 1.0};
  return synthesize_from_coefficients(1.0, 1.0, build_filter(WaveletFamily::Daubechies, 3), g, g, seed).kernel;
}

}  // namespace

TEST_CASE("apply_multiplier") {
  const Matrix phi = testing::random_matrix(37, 6, 6);
  CHECK(apply_multiplier(SchurSymbol::from_matrix(Matrix(6, 6, 1.0)), phi) == phi);
  const Matrix zero = apply_multiplier(SchurSymbol::from_matrix(Matrix(6, 6)), phi);
  for (double v : zero.data()) CHECK(v == 0.0);
  const Matrix k = testing::random_matrix(38, 6, 6);
  const Matrix out = apply_multiplier(SchurSymbol::from_matrix(k), phi);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t m = 0; m < 6; ++m) CHECK(out(i, m) == k(i, m) * phi(i, m));
  CHECK(code_of([&] { apply_multiplier(SchurSymbol::from_matrix(k), Matrix(5, 6)); }) == ErrorCode::ShapeMismatch);
  CHECK(code_of([] { SchurSymbol::from_matrix(Matrix(3, 4)); }) == ErrorCode::ShapeMismatch);
  CHECK(p_flat(1.0) == 2.0);
  CHECK(p_flat(0.5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("rank-one lower bound") {
  SUBCASE("constant symbol") {
    for (double c : {1.0, -2.5})
      for (double p : {0.5, 1.0, 2.0}) {
        const RankOneBound r = rank_one_lower_bound(SchurSymbol::from_matrix(Matrix(5, 5, c)), p, 4, 5, 1);
        CHECK(r.value == doctest::Approx(std::abs(c)).epsilon(1e-12));
      }
  }
  SUBCASE("step function in t on an 8-point grid") {
    const DyadicGrid g{3, 0.0, 1.0};
    SampledKernel k{g, g, Matrix(8, 8), "step"};
    const double a[8] = {0.2, 0.2, -0.7, -0.7, 1.3, 1.3, 0.4, 0.4};
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t m = 0; m < 8; ++m) k.values(i, m) = a[i];
    const RankOneBound r = rank_one_lower_bound(SchurSymbol::from_kernel(k), 1.0, 200, 50, 5);
    CHECK(r.value >= 0.95 * 1.3);
    CHECK(r.value <= 1.3 * (1.0 + 1e-12));
  }
  SUBCASE("p = 2 gives the largest entry") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrix a = testing::random_matrix(seed, 6, 6);
      const double top = *std::max_element(a.data().begin(), a.data().end(),
                                           [](double x, double y) { return std::abs(x) < std::abs(y); });
      const RankOneBound r = rank_one_lower_bound(SchurSymbol::from_matrix(a), 2.0, 8, 10, seed);
      CHECK(r.value >= std::abs(top));
      CHECK(r.value <= std::abs(top) * (1.0 + 1e-12));
      CHECK(r.heuristic);
    }
  }
  SUBCASE("deterministic and monotone in the budget") {
    const SchurSymbol k = SchurSymbol::from_matrix(testing::random_matrix(9, 8, 8));
    const RankOneBound a = rank_one_lower_bound(k, 1.0, 6, 10, 3);
    const RankOneBound b = rank_one_lower_bound(k, 1.0, 6, 10, 3);
    CHECK(a.value == b.value);
    CHECK(a.xi == b.xi);
    CHECK(rank_one_lower_bound(k, 1.0, 12, 10, 3).value >= a.value);
    CHECK(rank_one_lower_bound(k, 1.0, 6, 20, 3).value >= a.value);
    CHECK(std::abs(testing::norm2(a.xi) - 1.0) < 1e-12);
    CHECK(std::abs(testing::norm2(a.eta) - 1.0) < 1e-12);
    CHECK(rank_one_objective(k.values(), a.xi, a.eta, 1.0) == doctest::Approx(a.value).epsilon(1e-12));
  }
  CHECK(code_of([] { rank_one_lower_bound(SchurSymbol::from_matrix(Matrix(2, 2, 1.0)), 2.5, 2, 2, 1); }) ==
        ErrorCode::InvalidExponent);
}

TEST_CASE("matrix oracle") {
  SUBCASE("all-ones") {
    for (double p : {0.5, 1.0}) CHECK(matrix_mp_oracle(Matrix(4, 4, 1.0), p, 4, 1).value == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("diagonal symbols") {
    // sum |d_i|^p (u_i v_i)^p is maximized by Hoelder under sum u_i v_i <= 1:
    // the result is (sum |d_i|^{p/(1-p)})^{(1-p)/p}, max |d_i| at p = 1.
    const Matrix d = from_values(3, {0.5, 0, 0, 0, -2.0, 0, 0, 0, 1.0});
    CHECK(matrix_mp_oracle(d, 1.0, 8, 2).value == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(matrix_mp_oracle(d, 0.5, 8, 2).value == doctest::Approx(3.5).epsilon(1e-6));
  }
  SUBCASE("2 x 2 against a dense angle grid") {
    const double sym[4] = {1.0, 1.0, 1.0, -1.0};
    const double gen[4] = {2.0, 1.0, 0.5, -1.0};
    CHECK(grid_search_2x2(sym, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
    for (const double* m : {sym, gen})
      for (double p : {0.5, 1.0}) {
        const double grid = grid_search_2x2(m, p);
        const OracleResult o = matrix_mp_oracle(from_values(2, {m[0], m[1], m[2], m[3]}), p, 8, 7);
        CAPTURE(p);
        CHECK(std::abs(o.value - grid) <= 1e-4 * grid);
      }
  }
  SUBCASE("4 x 4 sampled bound agrees with the oracle") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const Matrix a = testing::random_matrix(seed, 4, 4);
      const OracleResult o = matrix_mp_oracle(a, 1.0, 16, seed);
      const RankOneBound r = rank_one_lower_bound(SchurSymbol::from_matrix(a), 1.0, 24, 30, seed);
      CHECK(o.spread <= 0.01);
      CHECK(std::abs(r.value - o.value) <= 0.05 * o.value);
    }
  }
  CHECK(code_of([] { matrix_mp_oracle(Matrix(9, 9, 1.0), 1.0, 1, 1); }) == ErrorCode::MatrixTooLarge);
}

TEST_CASE("partition upper bound") {
  const double p = 1.0;
  SUBCASE("single strip reduces to the strip estimate") {
    const Matrix a = testing::random_matrix(3, 8, 8);
    const SchurSymbol k = SchurSymbol::from_matrix(a);
    const PartitionBound b = partition_upper_bound(k, {0.0, 8.0}, p);
    REQUIRE(b.strips.size() == 1);
    CHECK(b.value == doctest::Approx(factorization_bound(a, p)).epsilon(1e-14));
    CHECK(b.strips[0].method == "factorization");
    CHECK(b.value >= rank_one_lower_bound(k, p, 8, 20, 1).value);
  }
  SUBCASE("two product strips aggregate in l_2 at p = 1") {
    // strip r holds psi_r(t) m_r(s); its bound is |psi_r|_inf |m_r|_inf.
    const auto psi1 = testing::random_vector(1, 4), psi2 = testing::random_vector(2, 4);
    const auto m1 = testing::random_vector(3, 8), m2 = testing::random_vector(4, 8);
    Matrix a(8, 8);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t m = 0; m < 8; ++m) {
        a(i, m) = psi1[i] * m1[m];
        a(i + 4, m) = psi2[i] * m2[m];
      }
    auto sup = [](const std::vector<double>& x) {
      double s = 0.0;
      for (double v : x) s = std::max(s, std::abs(v));
      return s;
    };
    const double v1 = sup(psi1) * sup(m1), v2 = sup(psi2) * sup(m2);
    const PartitionBound b = partition_upper_bound(SchurSymbol::from_matrix(a), {0.0, 4.0, 8.0}, p);
    REQUIRE(b.strips.size() == 2);
    CHECK(b.strips[0].method == "product_form");
    CHECK(b.strips[0].value == doctest::Approx(v1).epsilon(1e-12));
    CHECK(b.strips[1].value == doctest::Approx(v2).epsilon(1e-12));
    CHECK(b.value == doctest::Approx(std::hypot(v1, v2)).epsilon(1e-12));
  }
  SUBCASE("symbol supported on one strip") {
    Matrix a(8, 8);
    const Matrix r = testing::random_matrix(5, 2, 8);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t m = 0; m < 8; ++m) a(i + 2, m) = r(i, m);
    const PartitionBound b = partition_upper_bound(SchurSymbol::from_matrix(a), {0.0, 2.0, 4.0, 8.0}, 0.5);
    CHECK(b.strips[0].value == 0.0);
    CHECK(b.strips[2].value == 0.0);
    CHECK(b.value == doctest::Approx(b.strips[1].value).epsilon(1e-14));
  }
  SUBCASE("p = 2 uses the sup norm") {
    const Matrix a = testing::random_matrix(6, 8, 8);
    const PartitionBound b = partition_upper_bound(SchurSymbol::from_matrix(a), {0.0, 8.0}, 2.0);
    CHECK(b.value == doctest::Approx(SchurSymbol::from_matrix(a).bounded_norm()));
    CHECK(b.strips[0].method == "sup_norm");
  }
  SUBCASE("kernel symbols partition the x box") {
    const SampledKernel k = synthesized(3, 5);
    const SchurSymbol s = SchurSymbol::from_kernel(k);
    const PartitionBound b = partition_upper_bound(s, uniform_breakpoints(s, 4), p);
    REQUIRE(b.strips.size() == 4);
    CHECK(b.strips.front().first_row == 0);
    CHECK(b.strips.back().last_row == 32);
    for (std::size_t r = 1; r < 4; ++r) CHECK(b.strips[r].first_row == b.strips[r - 1].last_row);
  }
  const SchurSymbol k = SchurSymbol::from_matrix(Matrix(4, 4, 1.0));
  CHECK(code_of([&] { partition_upper_bound(k, {0.0}, p); }) == ErrorCode::EmptyPartition);
  CHECK(code_of([&] { partition_upper_bound(k, {0.0, 2.0, 2.0, 4.0}, p); }) == ErrorCode::EmptyPartition);
  CHECK(code_of([&] { partition_upper_bound(k, {0.0, 3.0}, p); }) == ErrorCode::EmptyPartition);
}

TEST_CASE("wavelet slices") {
  const WaveletFilter f = build_filter(WaveletFamily::Daubechies, 3);
  const DyadicGrid g{6, 0.0, 1.0};
  SUBCASE("constant in t") {
    SampledKernel k{g, g, Matrix(64, 64), ""};
    const auto eta = testing::random_vector(1, 64);
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t m = 0; m < 64; ++m) k.values(i, m) = eta[m];
    for (const SliceLevel& s : wavelet_slices(k, f))
      if (!s.scaling)
        for (double v : s.coefficients.data()) CHECK(std::abs(v) < 1e-12);
  }
  SUBCASE("separable symbol") {
    const auto xi = testing::random_vector(2, 64), eta = testing::random_vector(3, 64);
    SampledKernel k{g, g, Matrix(64, 64), ""};
    for (std::size_t i = 0; i < 64; ++i)
      for (std::size_t m = 0; m < 64; ++m) k.values(i, m) = xi[i] * eta[m];
    double worst = 0.0;
    for (const SliceLevel& s : wavelet_slices(k, f))
      for (std::size_t l = 0; l < s.atoms.rows(); ++l) {
        double inner = 0.0;
        for (std::size_t i = 0; i < 64; ++i) inner += s.atoms(l, i) * xi[i] * g.spacing();
        for (std::size_t m = 0; m < 64; ++m) worst = std::max(worst, std::abs(s.coefficients(l, m) - inner * eta[m]));
      }
    CHECK(worst < 1e-12);
  }
  SUBCASE("reconstruction, seed 41") {
    const SampledKernel k{g, g, testing::random_matrix(41, 64, 64), ""};
    const Matrix back = reconstruct_slices(wavelet_slices(k, f));
    CHECK(testing::max_abs_diff(back.data(), k.values.data()) < 1e-8);
  }
  SUBCASE("atom supports respect the classes") {
    for (const SliceLevel& s : wavelet_slices(synthesized(4, 6), f)) {
      const std::size_t n = s.atoms.rows();
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t l2 = l + 1; l2 < n; ++l2) {
          if (l % s.classes != l2 % s.classes) continue;
          double overlap = 0.0;
          for (std::size_t i = 0; i < 64; ++i) overlap += std::abs(s.atoms(l, i) * s.atoms(l2, i));
          CHECK(overlap == 0.0);
        }
    }
  }
}

TEST_CASE("wavelet slice bound") {
  const WaveletFilter f = build_filter(WaveletFamily::Daubechies, 2);
  const DyadicGrid gx{6, 0.0, 1.0}, gy{5, 0.0, 1.0};
  SUBCASE("zero symbol") {
    CHECK(wavelet_slice_bound(SampledKernel{gx, gy, Matrix(64, 32), ""}, f, 1.0).value == 0.0);
  }
  SUBCASE("single slice is homogeneous in m") {
    const auto m = testing::random_vector(7, 32);
    auto m2 = m;
    for (double& v : m2) v *= 2.0;
    const SliceBound b1 = wavelet_slice_bound(synthesize_kernel({{0, 0, m}}, f, gx, gy), f, 1.0);
    const SliceBound b2 = wavelet_slice_bound(synthesize_kernel({{0, 0, m2}}, f, gx, gy), f, 1.0);
    CHECK(b1.value > 0.0);
    CHECK(b2.value == doctest::Approx(2.0 * b1.value).epsilon(1e-9));
  }
  SUBCASE("synthesized symbol, seed 43") {
    const SampledKernel k = synthesized(43, 5);
    for (double p : {0.5, 1.0}) {
      const double lower = rank_one_lower_bound(SchurSymbol::from_kernel(k), p, 8, 15, 43).value;
      CHECK(wavelet_slice_bound(k, f, p).value >= lower);
    }
  }
  CHECK(code_of([&] { wavelet_slice_bound(SampledKernel{gx, gy, Matrix(64, 32), ""}, f, 2.0); }) ==
        ErrorCode::InvalidExponent);
}

TEST_CASE("Besov Schur estimate") {
  const WaveletFilter f = build_filter(WaveletFamily::Daubechies, 3);
  const DyadicGrid g{5, 0.0, 1.0};
  SchurOptions opt;
  opt.samples = 8;
  opt.ascent_steps = 15;
  SUBCASE("constant symbol") {
    for (double p : {0.5, 1.0}) {
      const SchurReport r = besov_schur_estimate(constant_kernel(g, 1.0), f, p, opt);
      CHECK(std::abs(r.rhs - 1.0) <= 1e-12);
      CHECK(r.lower_bound() >= 0.999);
      CHECK(r.consistent);
    }
  }
  SUBCASE("symbol without t-variation") {
    const auto a = testing::random_vector(8, 32);
    SampledKernel k{g, g, Matrix(32, 32), "a(s)"};
    for (std::size_t i = 0; i < 32; ++i)
      for (std::size_t m = 0; m < 32; ++m) k.values(i, m) = a[m];
    const SchurReport r = besov_schur_estimate(k, f, 1.0, opt);
    CHECK(r.seminorm < 1e-10);
    CHECK(r.rhs == doctest::Approx(k.sup_norm()).epsilon(1e-9));
    CHECK(r.lower_bound() == doctest::Approx(k.sup_norm()).epsilon(1e-9));
    CHECK(r.consistent);
  }
  SUBCASE("soundness and homogeneity") {
    const SampledKernel k = synthesized(2, 5);
    SampledKernel k3 = k;
    for (double& v : k3.values.data()) v *= -3.0;
    for (double p : {0.5, 1.0}) {
      const SchurReport r = besov_schur_estimate(k, f, p, opt);
      const SchurReport r3 = besov_schur_estimate(k3, f, p, opt);
      CHECK(r.consistent);
      CHECK(r.lower_bound() <= r.partition.value + kSchurSoundnessTolerance);
      CHECK(r.lower_bound() <= r.wavelet_slice.value + kSchurSoundnessTolerance);
      CHECK(r.lower_bound() <= r.besov_upper + kSchurSoundnessTolerance);
      // coefficients planted as zero come back at rounding level, and the
      // p < 1 quasinorms lift them to about 1e-8 relative
      CHECK(r3.partition.value == doctest::Approx(3.0 * r.partition.value).epsilon(1e-6));
      CHECK(r3.wavelet_slice.value == doctest::Approx(3.0 * r.wavelet_slice.value).epsilon(1e-6));
      CHECK(r3.besov_upper == doctest::Approx(3.0 * r.besov_upper).epsilon(1e-6));
      CHECK(r3.rhs == doctest::Approx(3.0 * r.rhs).epsilon(1e-6));
      CHECK(r3.lower_bound() == doctest::Approx(3.0 * r.lower_bound()).epsilon(1e-6));
    }
  }
  SUBCASE("empirical constant is stable across seeds") {
    std::vector<double> c;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const SchurReport r = besov_schur_estimate(synthesized(seed, 5), f, 1.0, opt);
      CHECK(r.consistent);
      c.push_back(r.empirical_constant);
    }
    double mean = 0.0;
    for (double v : c) mean += v / static_cast<double>(c.size());
    for (double v : c) CHECK(std::abs(v - mean) <= 0.3 * mean);
  }
  CHECK(code_of([&] { besov_schur_estimate(constant_kernel(g, 1.0), f, 2.0); }) == ErrorCode::InvalidExponent);
}
