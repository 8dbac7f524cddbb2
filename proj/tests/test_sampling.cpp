#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "samopt/harness.hpp"
#include "samopt/sampling.hpp"

using namespace samopt;

namespace {

// Exact Hessian-vector product of the synthetic quadratic.
Vector hessian_product(const SyntheticQuadratic& quad, const Vector& z) {
  Vector y = hadamard_apply(z);
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] *= 2.0 / std::pow(i + 1.0, quad.q());
  return hadamard_apply(std::move(y));
}

// Test-side symmetric Lanczos with the exact operator: three-term recurrence
// building the tridiagonal projection, then Ritz values.
Vector lanczos_ritz_values(const SyntheticQuadratic& quad, const Vector& start,
                           int m) {
  const int n = static_cast<int>(start.size());
  std::vector<Vector> v = {scaled(start, 1.0 / norm(start))};
  Vector alpha, beta;
  for (int j = 0; j < m; ++j) {
    Vector w = hessian_product(quad, v[j]);
    if (j > 0) axpy(-beta[j - 1], v[j - 1], w);
    alpha.push_back(dot(w, v[j]));
    axpy(-alpha[j], v[j], w);
    // full reorthogonalization keeps the comparison clean
    for (const Vector& prev : v) axpy(-dot(w, prev), prev, w);
    const double b = norm(w);
    if (b < 1e-12) break;
    beta.push_back(b);
    v.push_back(scaled(w, 1.0 / b));
    if (static_cast<int>(v.size()) > m) break;
  }
  const int k = static_cast<int>(alpha.size());
  Matrix t(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < k) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
  }
  (void)n;
  return symmetric_eigendecomposition(t).eigenvalues;
}

ArnoldiResult run_clean(SyntheticQuadratic& quad, const Vector& x0, int m,
                        double alpha) {
  const Eval e0 = quad.eval(x0);
  return arnoldi_sample(quad, x0, e0.f, e0.g, m, alpha);
}

}  // namespace

TEST_CASE("zero-noise sampling recovers the full spectrum at m = n") {
  for (double q : {0.5, 1.0, 2.0}) {
    for (double alpha : {0.1, 1.0, 10.0}) {
      SyntheticQuadratic quad(4, q);
      const int n = quad.dimension();
      const Vector x0 = initial_point_sin(n);
      const ArnoldiResult arn = run_clean(quad, x0, n, alpha);
      REQUIRE(arn.spectrum.m == n);

      Vector expected(n);
      for (int i = 1; i <= n; ++i)
        expected[i - 1] = quad.exact_hessian_eigenvalue(i);
      Vector got = arn.spectrum.eigenvalues;
      std::sort(got.begin(), got.end(), std::greater<>());
      for (int i = 0; i < n; ++i)
        CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("first sample moves along the negative normalized gradient") {
  SyntheticQuadratic quad(3, 1.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const Eval e0 = quad.eval(x0);
  const double alpha = 0.37;
  const ArnoldiResult arn = arnoldi_sample(quad, x0, e0.f, e0.g, 3, alpha);

  Vector expected = x0;
  axpy(-alpha / norm(e0.g), e0.g, expected);
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(arn.samples.X[1][i] == doctest::Approx(expected[i]).epsilon(1e-14));
  CHECK(norm(subtract(arn.samples.X[1], x0)) ==
        doctest::Approx(alpha).epsilon(1e-12));
}

TEST_CASE("gradient aligned with an eigenvector breaks down after one sample") {
  SyntheticQuadratic quad(3, 2.0);
  const int n = quad.dimension();
  const int k = 2;  // 1-based eigenvector index
  Vector unit(n, 0.0);
  unit[k - 1] = 1.0;
  const Vector x0 = hadamard_apply(unit);  // g(x0) = 2 Sigma_kk x0
  const Eval e0 = quad.eval(x0);

  const ArnoldiResult arn = arnoldi_sample(quad, x0, e0.f, e0.g, 8, 0.5);
  CHECK(arn.samples.m == 1);
  CHECK(arn.spectrum.eigenvalues.size() == 1);
  CHECK(arn.spectrum.eigenvalues[0] ==
        doctest::Approx(quad.exact_hessian_eigenvalue(k)).epsilon(1e-10));
}

TEST_CASE("zero gradient cannot seed the iteration") {
  SyntheticQuadratic quad(2, 1.0);
  const Vector x0(quad.dimension(), 0.0);
  CHECK_THROWS_AS(arnoldi_sample(quad, x0, 0.0, x0, 4, 1.0),
                  ZeroGradientError);
}

TEST_CASE("zero-noise Hessenberg block is symmetric") {
  SyntheticQuadratic quad(5, 1.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const ArnoldiResult arn = run_clean(quad, x0, 12, 1.0);
  const Matrix h = arn.spectrum.hessenberg.leading_block();
  double hnorm = 0.0, asym = 0.0;
  for (int i = 0; i < h.rows(); ++i)
    for (int j = 0; j < h.cols(); ++j) {
      hnorm += h(i, j) * h(i, j);
      const double d = h(i, j) - h(j, i);
      asym += d * d;
    }
  CHECK(std::sqrt(asym) <= 1e-10 * std::sqrt(hnorm));
}

TEST_CASE("Ritz values match the exact-product Lanczos oracle") {
  SyntheticQuadratic quad(6, 1.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const Eval e0 = quad.eval(x0);
  const int m = 8;
  const ArnoldiResult arn = arnoldi_sample(quad, x0, e0.f, e0.g, m, 1.0);

  const Vector seed = scaled(e0.g, -1.0 / norm(e0.g));
  Vector oracle = lanczos_ritz_values(quad, seed, m);
  REQUIRE(static_cast<int>(oracle.size()) == arn.spectrum.m);
  for (int i = 0; i < arn.spectrum.m; ++i)
    CHECK(arn.spectrum.eigenvalues[i] ==
          doctest::Approx(oracle[i]).epsilon(1e-8));
}

TEST_CASE("sample geometry and evaluation accounting") {
  SyntheticQuadratic quad(5, 2.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const Eval e0 = quad.eval(x0);
  const long long before = quad.eval_count();
  const double alpha = 2.5;
  const ArnoldiResult arn = arnoldi_sample(quad, x0, e0.f, e0.g, 10, alpha);
  CHECK(quad.eval_count() - before == arn.samples.m);
  CHECK(static_cast<int>(arn.samples.X.size()) == arn.samples.m + 1);

  std::vector<Vector> directions;
  for (int j = 1; j <= arn.samples.m; ++j) {
    const Vector d = subtract(arn.samples.X[j], x0);
    CHECK(norm(d) == doctest::Approx(alpha).epsilon(1e-10));
    directions.push_back(scaled(d, 1.0 / alpha));
  }
  CHECK(orthonormality_defect(directions) <= 1e-10);
}

TEST_CASE("noisy sampling keeps the lifted eigenvectors orthonormal") {
  for (double level : {0.005, 0.05, 0.25}) {
    auto clean = std::make_shared<SyntheticQuadratic>(6, 2.0);
    const Vector x0 = initial_point_sin(clean->dimension());
    NoiseModel model;
    model.kind = NoiseKind::gaussian;
    model.rel_sigma_g = level;
    const CalibratedNoise cal = calibrate_noise(model, *clean, x0);
    NoisyOracle noisy(clean, cal, derive_seed(31, 0, 0));
    const Eval e0 = noisy.eval(x0);
    const ArnoldiResult arn = arnoldi_sample(noisy, x0, e0.f, e0.g, 16, 1.0);
    CHECK(orthonormality_defect(arn.spectrum.eigvecs) <= 1e-9);
    CHECK(orthonormality_defect(arn.spectrum.basis) <= 1e-10);
  }
}

TEST_CASE("eigenvalue error metric") {
  CHECK(eigenvalue_error(2.0, 2.0) == doctest::Approx(0.0));
  CHECK(eigenvalue_error(2.0, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(eigenvalue_error(0.0, 1.0), std::domain_error);

  // zero-noise run reproduces the scaled q=2 eigenvalue
  SyntheticQuadratic quad(4, 2.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const ArnoldiResult arn = run_clean(quad, x0, quad.dimension(), 1.0);
  Vector sorted = arn.spectrum.eigenvalues;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  CHECK(eigenvalue_error(sorted[1], 2.0 / 4.0) <= 1e-8);
}

TEST_CASE("spectrum truncation keeps the top magnitudes") {
  SpectralEstimate spec;
  spec.m = 3;
  spec.eigenvalues = {-5.0, 3.0, 1.0};  // already |.|-sorted
  spec.eigvecs = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};

  const TruncatedSpectrum t2 = truncate_spectrum(spec, 2);
  CHECK(t2.eigenvalues == Vector{-5.0, 3.0});
  CHECK(t2.eigvecs.size() == 2);

  const TruncatedSpectrum t3 = truncate_spectrum(spec, 3);
  CHECK(t3.eigenvalues == spec.eigenvalues);
  CHECK_THROWS_AS(truncate_spectrum(spec, 0), std::invalid_argument);
  CHECK_THROWS_AS(truncate_spectrum(spec, 4), std::invalid_argument);

  // zero-noise q=2: the top-4 truncation equals the four largest exact values
  SyntheticQuadratic quad(4, 2.0);
  const Vector x0 = initial_point_sin(quad.dimension());
  const ArnoldiResult arn = run_clean(quad, x0, quad.dimension(), 1.0);
  const TruncatedSpectrum top = truncate_spectrum(arn.spectrum, 4);
  for (int i = 1; i <= 4; ++i)
    CHECK(top.eigenvalues[i - 1] ==
          doctest::Approx(quad.exact_hessian_eigenvalue(i)).epsilon(1e-8));
}

TEST_CASE("dominant eigenvalue error grows with the noise level") {
  const int runs = 100;
  const std::vector<double> levels = {0.005, 0.025, 0.05};
  std::vector<double> medians;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    std::vector<double> errors;
    for (int run = 0; run < runs; ++run) {
      auto clean = std::make_shared<SyntheticQuadratic>(8, 2.0);
      const Vector x0 = initial_point_sin(clean->dimension());
      NoiseModel model;
      model.kind = NoiseKind::gaussian;
      model.rel_sigma_g = levels[li];
      const CalibratedNoise cal = calibrate_noise(model, *clean, x0);
      // Streams shared across levels: each level sees scaled versions of the
      // same draws, which makes the trend comparison sharp.
      NoisyOracle noisy(clean, cal, derive_seed(1905, run, 0));
      const Eval e0 = noisy.eval(x0);
      const ArnoldiResult arn = arnoldi_sample(noisy, x0, e0.f, e0.g, 16, 1.0);
      errors.push_back(eigenvalue_error(arn.spectrum.eigenvalues[0], 2.0));
    }
    medians.push_back(summarize(errors).median);
  }
  CHECK(medians[0] <= medians[1]);
  CHECK(medians[1] <= medians[2]);
}
