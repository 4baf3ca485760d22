#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "besovop/error.hpp"
#include "besovop/random.hpp"
#include "besovop/spectral.hpp"
#include "besovop/svd.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace besovop;

namespace {

// Singular values from an independent symmetric eigensolve of A^T A.
std::vector<double> gram_oracle(const Matrix& a) {
  Eigen::MatrixXd m(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i))));
  std::sort(out.begin(), out.end(), std::greater<>());
  out.resize(std::min(a.rows(), a.cols()));
  return out;
}

double frobenius(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

SingularSpectrum random_spectrum(std::uint64_t seed) {
  return singular_values(testing::random_matrix(seed, 32, 32));
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::FormatError;
}

}  // namespace

TEST_CASE("discretization") {
  const DyadicGrid gx{5, 0.0, 2.0}, gy{4, -1.0, 1.0};
  SUBCASE("zero kernel") {
    const DiscreteOperator op = discretize(SampledKernel{gx, gy, Matrix(32, 16), ""});
    for (double v : op.matrix.data()) CHECK(v == 0.0);
  }
  SUBCASE("Frobenius norm equals the grid L2 norm") {
    const SampledKernel k{gx, gy, testing::random_matrix(29, 32, 16), "r"};
    CHECK(std::abs(frobenius(discretize(k).matrix) - k.l2_norm()) <= 1e-12 * k.l2_norm());
  }
  SUBCASE("linearity") {
    const SampledKernel k1{gx, gy, testing::random_matrix(1, 32, 16), ""};
    const SampledKernel k2{gx, gy, testing::random_matrix(2, 32, 16), ""};
    SampledKernel mix = k1;
    for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values.data()[i] = 2.0 * k1.values.data()[i] - 3.0 * k2.values.data()[i];
    const Matrix a = discretize(mix).matrix, a1 = discretize(k1).matrix, a2 = discretize(k2).matrix;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.data()[i] - (2.0 * a1.data()[i] - 3.0 * a2.data()[i])) < 1e-14);
  }
  SUBCASE("separable Gaussian is rank one") {
    KernelSpec s{KernelFamily::SeparableGaussian, {{"c1", 0.5}, {"c2", 0.0}, {"sigma1", 0.3}, {"sigma2", 0.2}}, {}, ""};
    const SingularSpectrum mu = singular_values(discretize(sample_builtin(s, gx, gy)));
    CHECK(mu.mu[1] < 1e-10 * mu.mu[0]);
    CHECK(mu.rank() == 1);
  }
}

TEST_CASE("singular values") {
  SUBCASE("diagonal") {
    Matrix d(5, 5);
    const double diag[] = {3.0, 2.5, 1.0, 0.5, 0.0};
    for (std::size_t i = 0; i < 5; ++i) d(i, i) = diag[i];
    const SingularSpectrum s = singular_values(d);
    for (std::size_t i = 0; i < 5; ++i) CHECK(s.mu[i] == diag[i]);
  }
  SUBCASE("rank one") {
    const auto xi = testing::random_vector(1, 20);
    const auto eta = testing::random_vector(2, 12);
    Matrix a(20, 12);
    for (std::size_t i = 0; i < 20; ++i)
      for (std::size_t m = 0; m < 12; ++m) a(i, m) = xi[i] * eta[m];
    const SingularSpectrum s = singular_values(a);
    REQUIRE(s.size() == 12);
    CHECK(s.mu[0] == doctest::Approx(testing::norm2(xi) * testing::norm2(eta)).epsilon(1e-13));
    for (std::size_t i = 1; i < 12; ++i) CHECK(s.mu[i] < 1e-13 * s.mu[0]);
  }
  SUBCASE("seed 31 against the Gram eigensolve") {
    const Matrix a = testing::random_matrix(31, 32, 32);
    const SingularSpectrum s = singular_values(a);
    const auto oracle = gram_oracle(a);
    double energy = 0.0;
    for (double v : s.mu.values()) energy += v * v;
    const double f2 = frobenius(a) * frobenius(a);
    CHECK(std::abs(energy - f2) <= 1e-10 * f2);
    for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(s.mu[i] - oracle[i]) <= 1e-8 * s.mu[0]);
    CHECK(s.mu.is_nonincreasing());
  }
  SUBCASE("transposition invariance and vectors") {
    const Matrix a = testing::random_matrix(33, 17, 9);
    const SvdResult r = jacobi_svd(a, true);
    const SvdResult rt = jacobi_svd(a.transposed(), true);
    for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(r.values[i] - rt.values[i]) <= 1e-13 * r.values[0]);
    // A = U diag(sigma) V^T
    for (std::size_t i = 0; i < 17; ++i)
      for (std::size_t m = 0; m < 9; ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < 9; ++k) s += r.u(i, k) * r.values[k] * r.v(m, k);
        CHECK(std::abs(s - a(i, m)) < 1e-12);
      }
    CHECK(r.values[0] <= frobenius(a));
  }
  SUBCASE("rectangular shapes") {
    for (auto [rows, cols] : {std::pair{1, 7}, std::pair{7, 1}, std::pair{40, 3}}) {
      const Matrix a = testing::random_matrix(rows * 100 + cols, rows, cols);
      const auto s = singular_values(a);
      const auto o = gram_oracle(a);
      for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(s.mu[i] - o[i]) <= 1e-10 * s.mu[0]);
    }
  }
}

TEST_CASE("Schatten quasinorms") {
  const SingularSpectrum rank_one = make_spectrum({2.5, 0.0, 0.0});
  for (double p : {0.3, 1.0, 2.0}) CHECK(schatten(rank_one, p) == doctest::Approx(2.5).epsilon(1e-15));
  const Matrix a = testing::random_matrix(31, 32, 32);
  const SingularSpectrum s = singular_values(a);
  CHECK(schatten(s, 2.0) == doctest::Approx(frobenius(a)).epsilon(1e-12));
  double half = 0.0;
  for (double v : s.mu.values()) half += std::sqrt(v);
  CHECK(schatten(s, 0.5) == doctest::Approx(half * half).epsilon(1e-13));
  CHECK(schatten_lorentz(s, 1.0, 1.0) == schatten(s, 1.0));
}

TEST_CASE("Hilbert-Schmidt approximation numbers") {
  const NonnegSeq e1 = hs_approx_numbers(make_spectrum({1.0, 0.0, 0.0}));
  for (double v : e1.values()) CHECK(v == 0.0);
  const NonnegSeq e2 = hs_approx_numbers(make_spectrum({4.0, 3.0}));
  CHECK(e2[0] == 3.0);
  CHECK(e2[1] == 0.0);
  const SingularSpectrum s = random_spectrum(31);
  const NonnegSeq e = hs_approx_numbers(s);
  for (std::size_t n = 0; n < s.size(); ++n) {
    double t = 0.0;
    for (std::size_t k = n + 1; k < s.size(); ++k) t += s.mu[k] * s.mu[k];
    CHECK(std::abs(e[n] - std::sqrt(t)) <= 1e-12 * s.mu[0]);
  }
}

TEST_CASE("mu estimate") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) CHECK(check_mu_estimate(random_spectrum(seed)).value <= 1.0);
  SUBCASE("flat spectrum is the equality case") {
    // 2m + 1 ones: at n = m the tail beyond n holds exactly m ones.
    for (std::size_t m : {1, 3, 8}) {
      std::vector<double> v(2 * m + 1, 1.0);
      v.resize(2 * m + 6, 0.0);
      const RatioCheck r = check_mu_estimate(make_spectrum(v));
      CHECK(r.value == 1.0);
      CHECK(r.worst_index == m);
    }
  }
  SUBCASE("rank one") {
    const RatioCheck r = check_mu_estimate(make_spectrum({1.0, 0.0, 0.0, 0.0, 0.0}));
    CHECK(r.value == 0.0);
    CHECK(r.degenerate);
  }
  CHECK(code_of([] { check_mu_estimate(make_spectrum({1.0, 0.5})); }) == ErrorCode::SpectrumTooShort);
}

TEST_CASE("Lorentz equivalence ratio") {
  SUBCASE("rank one is degenerate") {
    const RatioCheck r = check_lpq_equivalence(make_spectrum({2.0, 0.0, 0.0}), 1.0, kInfinity);
    CHECK(r.value == 0.0);
    CHECK(r.degenerate);
  }
  SUBCASE("harmonic spectrum is stable under doubling") {
    std::vector<double> ratios;
    for (int levels = 6; levels <= 12; ++levels) {
      std::vector<double> mu(std::size_t{1} << levels);
      for (std::size_t n = 0; n < mu.size(); ++n) mu[n] = 1.0 / static_cast<double>(n + 1);
      ratios.push_back(check_lpq_equivalence(make_spectrum(mu), 1.0, kInfinity).value);
    }
    for (std::size_t i = 1; i < ratios.size(); ++i) CHECK(std::abs(ratios[i] / ratios[i - 1] - 1.0) < 0.2);
  }
  SUBCASE("seeded decaying spectra stay in a band") {
    for (double p : {0.5, 1.0, 1.5}) {
      double lo = kInfinity, hi = 0.0;
      for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        std::vector<double> mu(512);
        for (std::size_t n = 0; n < mu.size(); ++n) mu[n] = std::pow(n + 1.0, -1.0 / p - 0.5) * rng.uniform(0.5, 1.5);
        const double r = check_lpq_equivalence(make_spectrum(mu), p, p).value;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
      }
      CAPTURE(p);
      CHECK(lo > 0.05);
      CHECK(hi < 20.0);
      CHECK(hi / lo < 2.0);
    }
  }
  CHECK(code_of([] { check_lpq_equivalence(make_spectrum({0.0, 0.0}), 1.0, 1.0); }) == ErrorCode::ZeroSpectrum);
  CHECK(code_of([] { check_lpq_equivalence(make_spectrum({1.0}), 2.0, 1.0); }) == ErrorCode::InvalidExponent);
}

TEST_CASE("main embedding") {
  const DyadicGrid g{6, 0.0, 1.0};
  const WaveletFilter f = build_filter(WaveletFamily::Daubechies, 3);
  SUBCASE("unit-normalized Gaussian tensor") {
    KernelSpec s{KernelFamily::SeparableGaussian, {{"c1", 0.5}, {"c2", 0.5}, {"sigma1", 0.08}, {"sigma2", 0.1}}, {}, "g"};
    SampledKernel k = sample_builtin(s, g, g);
    const double n = k.l2_norm();
    for (double& v : k.values.data()) v /= n;
    const EmbeddingReport r = verify_main_embedding({k}, f, 1.0);
    REQUIRE(r.cases.size() == 1);
    CHECK(r.cases[0].lhs == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.cases[0].ratio <= 1.0 + 1e-12);
  }
  SUBCASE("zero kernel") {
    CHECK(code_of([&] { verify_main_embedding({SampledKernel{g, g, Matrix(64, 64), "z"}}, f, 1.0); }) == ErrorCode::ZeroKernel);
  }
  SUBCASE("order of cases follows the input") {
    std::vector<SampledKernel> ks;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) ks.push_back(SampledKernel{g, g, testing::random_matrix(seed, 64, 64), std::to_string(seed)});
    const EmbeddingReport r = verify_main_embedding(ks, f, 0.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.cases[i].label == std::to_string(i + 1));
    CHECK(r.max_ratio == std::max({r.cases[0].ratio, r.cases[1].ratio, r.cases[2].ratio}));
  }
}

TEST_CASE("decay rate") {
  std::vector<double> mu(200);
  for (std::size_t n = 0; n < mu.size(); ++n) mu[n] = std::pow(n + 1.0, -2.0);
  CHECK(decay_rate(make_spectrum(mu), FitRange{0, 200}) == doctest::Approx(-2.0).epsilon(1e-10));
  for (std::size_t n = 0; n < mu.size(); ++n) mu[n] = 3.0 / static_cast<double>(n + 1);
  CHECK(decay_rate(make_spectrum(mu), middle_decade(200)) == doctest::Approx(-1.0).epsilon(1e-10));
  const FitRange r = middle_decade(256);
  CHECK(r.first == 5);
  CHECK(r.last == 52);
  mu[60] = 0.0;
  CHECK(code_of([&] { decay_rate(make_spectrum(mu), FitRange{50, 200}); }) == ErrorCode::NonpositiveValuesInRange);
  CHECK(code_of([&] { decay_rate(make_spectrum(mu), FitRange{10, 300}); }) == ErrorCode::SpectrumTooShort);
}
