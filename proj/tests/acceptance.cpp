// Acceptance suite: runs each acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  The exit code is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "samopt/harness.hpp"
#include "samopt/model.hpp"
#include "samopt/optimizer.hpp"
#include "samopt/sampling.hpp"
#include "test_support.hpp"

using namespace samopt;
using namespace samopt::testing;

namespace {

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
  void note(const std::string& what) {
    detail << (detail.str().empty() ? "" : "; ") << what;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Zero-noise spectral exactness on the n = 16 quadratic.
Criterion criterion_1() {
  Criterion c;
  const auto start = Clock::now();
  double worst = 0.0;
  for (double q : {0.5, 1.0, 2.0}) {
    for (double alpha : {0.1, 1.0, 10.0}) {
      SyntheticQuadratic quad(4, q);
      const int n = quad.dimension();
      const Vector x0 = initial_point_sin(n);
      const Eval e0 = quad.eval(x0);
      const ArnoldiResult arn = arnoldi_sample(quad, x0, e0.f, e0.g, n, alpha);
      c.require(arn.spectrum.m == n, "sampling truncated early");

      // dense-Hessian oracle: assemble 2 E Sigma E^T and eigendecompose
      Matrix hess(n, n);
      for (int j = 0; j < n; ++j) {
        Vector unit(n, 0.0);
        unit[j] = 1.0;
        Vector col = hadamard_apply(unit);
        for (int i = 0; i < n; ++i)
          col[i] *= 2.0 / std::pow(i + 1.0, q);
        col = hadamard_apply(std::move(col));
        for (int i = 0; i < n; ++i) hess(i, j) = col[i];
      }
      Vector dense = symmetric_eigendecomposition(hess).eigenvalues;
      std::sort(dense.begin(), dense.end());
      Vector got = arn.spectrum.eigenvalues;
      std::sort(got.begin(), got.end());
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(got[i] / dense[i] - 1.0));
    }
  }
  const double elapsed = seconds_since(start);
  c.require(worst <= 1e-8, "eigenvalue multiset error " + fmt(worst));
  c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  c.note("max rel err " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 2. Eigenvalue study replication: 100 runs per cell at n = 256.
Criterion criterion_2() {
  Criterion c;
  const auto start = Clock::now();
  ExperimentConfig config = default_config(ExperimentKind::eig_study);
  config.quiet = true;
  config.seed = 20240817;

  bool medians_finite = true;
  try {
    const ResultTable table = run_eig_study(config);

    // (a) zero-noise dominant-eigenvalue error per q
    for (double q : config.q_values) {
      bool found = false;
      for (const Observation& o : table.obs)
        if (o.run == -1 && o.q == q && o.noise == 0.0 && o.index == 1.0) {
          found = true;
          c.require(o.value <= 1e-8, "zero-noise err(q=" + fmt(q) + ") = " +
                                         fmt(o.value));
        }
      c.require(found, "missing zero-noise reference for q=" + fmt(q));
    }

    // (b) medians non-decreasing across noise levels for q = 2, first 4
    for (int i = 1; i <= 4; ++i) {
      std::vector<double> medians;
      for (double level : config.noise_levels)
        for (const SummaryRow& s : table.summary)
          if (s.q == 2.0 && s.noise == level && s.index == i)
            medians.push_back(s.stats.median);
      c.require(medians.size() == config.noise_levels.size(),
                "missing medians for eigenvalue " + std::to_string(i));
      for (std::size_t l = 0; l + 1 < medians.size(); ++l)
        c.require(medians[l] <= medians[l + 1],
                  "median err of eigenvalue " + std::to_string(i) +
                      " not monotone across noise levels");
    }

    // (c) all medians finite
    for (const SummaryRow& s : table.summary)
      if (!std::isfinite(s.stats.median)) medians_finite = false;
  } catch (const std::exception& e) {
    medians_finite = false;
    c.require(false, std::string("study failed: ") + e.what());
  }
  c.require(medians_finite, "non-finite median");
  const double elapsed = seconds_since(start);
  c.require(elapsed < 120.0, "runtime " + fmt(elapsed) + " s");
  c.note(fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 3. Subproblem oracle equivalence and KKT residuals.
Criterion criterion_3() {
  Criterion c;
  const auto start = Clock::now();
  std::mt19937 rng(1618);
  std::normal_distribution<double> dist;
  std::uniform_real_distribution<double> unif(0.1, 10.0);

  double worst_gap = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 3);
    Vector g(r), lam(r);
    for (double& v : g) v = dist(rng);
    for (double& v : lam) v = 3.0 * dist(rng);
    double delta = unif(rng) * 0.5;
    if (trial % 5 == 1) {  // forced hard case
      const int k = static_cast<int>(rng() % r);
      lam[k] = -2.0 - std::abs(dist(rng));
      g[k] = 0.0;
      for (double& v : g) v *= 0.01;
    }
    if (trial % 7 == 2) {  // zero curvature
      const int k = static_cast<int>(rng() % r);
      lam[k] = 0.0;
      if (trial % 2 == 0) g[k] = 0.0;
    }
    const TrustRegionStep step = solve_trust_region_subproblem(g, lam, delta);
    const double gap = reduced_objective(g, lam, step.y) -
                       grid_polish_minimum(g, lam, delta);
    worst_gap = std::max(worst_gap, std::abs(gap));
  }
  c.require(worst_gap <= 1e-6, "objective gap vs oracle " + fmt(worst_gap));

  double worst_kkt = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int r = 1 + static_cast<int>(rng() % 16);
    Vector g(r), lam(r);
    for (double& v : g) v = dist(rng);
    for (double& v : lam) v = 3.0 * dist(rng);
    const double delta = unif(rng);
    if (trial % 4 == 1) {
      const int k = static_cast<int>(rng() % r);
      lam[k] = -3.0;
      g[k] = 0.0;
      for (double& v : g) v *= 0.05;
    }
    if (trial % 6 == 2) lam[static_cast<int>(rng() % r)] = 0.0;
    const TrustRegionStep step = solve_trust_region_subproblem(g, lam, delta);
    worst_kkt = std::max(worst_kkt, kkt_residual(g, lam, step, delta));
  }
  c.require(worst_kkt <= 1e-9, "KKT residual " + fmt(worst_kkt));

  const double elapsed = seconds_since(start);
  c.require(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  c.note("gap " + fmt(worst_gap) + ", kkt " + fmt(worst_kkt) + ", " +
         fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 4. Analytic gradients match central finite differences.
Criterion criterion_4() {
  Criterion c;
  const auto start = Clock::now();
  std::mt19937 rng(271828);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  double worst = 0.0;

  SyntheticQuadratic quad(3, 2.0);
  ModifiedRosenbrock rosen(8);
  const auto check = [&](ObjectiveOracle& oracle) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector x(oracle.dimension());
      for (double& v : x) v = dist(rng);
      const Vector g = oracle.eval(x).g;
      const Vector fd = central_difference_gradient(oracle, x);
      for (std::size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst,
                         std::abs(fd[i] - g[i]) / (1.0 + std::abs(g[i])));
    }
  };
  check(quad);
  check(rosen);

  const double elapsed = seconds_since(start);
  c.require(worst <= 1e-5, "gradient mismatch " + fmt(worst));
  c.require(elapsed < 1.0, "runtime " + fmt(elapsed) + " s");
  c.note("max rel mismatch " + fmt(worst) + ", " + fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 5. Bias immunity of the directional reduced gradient (bit-identical).
Criterion criterion_5() {
  Criterion c;
  std::mt19937 rng(37);
  std::normal_distribution<double> dist;
  const int n = 12, m = 6, r = 3;

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Vector> x, g;
    Vector f;
    for (int j = 0; j <= m; ++j) {
      Vector xi(n), gi(n);
      for (double& v : xi) v = dist(rng);
      for (double& v : gi) v = dist(rng);
      x.push_back(xi);
      g.push_back(gi);
      f.push_back(dist(rng));
    }
    std::vector<Vector> v_cols;
    for (int k = 0; k < r; ++k) {
      Vector col(n);
      for (double& v : col) v = dist(rng);
      v_cols.push_back(scaled(col, 1.0 / norm(col)));
    }
    Matrix vr(m, m);
    for (int i = 0; i < m; ++i) vr(i, i) = 1.0;
    const Vector lam(r, 1.0);

    Vector bias(n);
    for (double& v : bias) v = 10.0 * dist(rng);
    std::vector<Vector> g_biased = g;
    for (Vector& gi : g_biased) axpy(1.0, bias, gi);

    const SampleSet clean = make_samples(x, f, g, 0.5);
    const SampleSet biased = make_samples(x, f, g_biased, 0.5);
    const Vector a = build_directional(clean, lam, v_cols, vr, 0.5).g_red;
    const Vector b = build_directional(biased, lam, v_cols, vr, 0.5).g_red;
    c.require(a == b, "g_red changed under bias in trial " +
                          std::to_string(trial));
  }
  c.note("10 random bias trials bit-identical");
  return c;
}

// ---------------------------------------------------------------------------
// 6. Variant comparison: paper setup, 1000 runs.
Criterion criterion_6() {
  Criterion c;
  const auto start = Clock::now();
  ExperimentConfig config = default_config(ExperimentKind::variant_compare);
  config.quiet = true;
  config.seed = 31415;

  const ResultTable table = run_variant_compare(config);

  // (a) unbiased step-average medians below 1 for every spectrum
  for (double q : config.q_values) {
    for (const SummaryRow& s : table.summary)
      if (s.q == q && s.bias == 0.0 && s.method == "step_average")
        c.require(s.stats.median < 1.0, "step-average median(q=" + fmt(q) +
                                            ") = " + fmt(s.stats.median));
  }

  // (b) directional medians: biased vs unbiased bootstrap intervals overlap
  for (double q : config.q_values) {
    std::vector<double> unbiased, biased;
    for (const Observation& o : table.obs)
      if (o.q == q && o.method == "directional") {
        if (o.bias == 0.0) unbiased.push_back(o.value);
        if (o.bias == 0.1) biased.push_back(o.value);
      }
    c.require(unbiased.size() == 1000 && biased.size() == 1000,
              "missing runs for q=" + fmt(q));
    const auto [lo_u, hi_u] = bootstrap_median_ci(unbiased, 2000, 7);
    const auto [lo_b, hi_b] = bootstrap_median_ci(biased, 2000, 8);
    const bool overlap = lo_u <= hi_b && lo_b <= hi_u;
    c.require(overlap, "directional bias CIs disjoint for q=" + fmt(q) +
                           " ([" + fmt(lo_u) + "," + fmt(hi_u) + "] vs [" +
                           fmt(lo_b) + "," + fmt(hi_b) + "])");
  }

  const double elapsed = seconds_since(start);
  c.require(elapsed < 300.0, "runtime " + fmt(elapsed) + " s");
  c.note(fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 7. Benchmark replication: two orders of magnitude with paper parameters.
Criterion criterion_7(double* sam_median_out) {
  Criterion c;
  const auto start = Clock::now();
  ExperimentConfig config = default_config(ExperimentKind::benchmark);
  config.quiet = true;
  config.seed = 62831;
  config.runs = 20;

  const ResultTable table = run_benchmark(config);
  double sam = 0.0, bfgs = 0.0, nm = 0.0;
  for (const SummaryRow& s : table.summary) {
    if (s.quantity != "final_ratio") continue;
    if (s.method == "sam_step_average") sam = s.stats.median;
    if (s.method == "bfgs") bfgs = s.stats.median;
    if (s.method == "nelder_mead") nm = s.stats.median;
  }
  if (sam_median_out) *sam_median_out = sam;

  const double threshold = std::pow(10.0, -1.5);
  c.require(sam <= threshold,
            "SAM step-average median " + fmt(sam) + " > 10^-1.5");
  c.require(bfgs >= 10.0 * sam,
            "BFGS median " + fmt(bfgs) + " < 10x SAM median " + fmt(sam));
  c.require(nm >= 10.0 * sam,
            "Nelder-Mead median " + fmt(nm) + " < 10x SAM median " + fmt(sam));

  const double elapsed = seconds_since(start);
  c.require(elapsed < 600.0, "runtime " + fmt(elapsed) + " s");
  c.note("medians: sam=" + fmt(sam) + " bfgs=" + fmt(bfgs) + " nm=" + fmt(nm) +
         ", " + fmt(elapsed) + " s");
  return c;
}

// ---------------------------------------------------------------------------
// 8. Determinism: repeated seeds give byte-identical output files.
Criterion criterion_8() {
  Criterion c;
  ExperimentConfig config = default_config(ExperimentKind::variant_compare);
  config.quiet = true;
  config.problem.p = 4;
  config.sam.m = 8;
  config.sam.r = 3;
  config.runs = 10;
  config.q_values = {1.0};

  const auto render = [](const ResultTable& t, OutputFormat f) {
    std::ostringstream os;
    if (f == OutputFormat::csv)
      write_csv(t, os);
    else
      write_json(t, os);
    return os.str();
  };
  for (OutputFormat f : {OutputFormat::csv, OutputFormat::json}) {
    const std::string a = render(run_variant_compare(config), f);
    const std::string b = render(run_variant_compare(config), f);
    c.require(a == b, "variant output differs between identical runs");
  }

  ExperimentConfig bench = default_config(ExperimentKind::benchmark);
  bench.quiet = true;
  bench.runs = 2;
  const std::string a = render(run_benchmark(bench), OutputFormat::csv);
  const std::string b = render(run_benchmark(bench), OutputFormat::csv);
  c.require(a == b, "benchmark output differs between identical runs");
  c.note("csv+json byte-identical across repeats");
  return c;
}

// ---------------------------------------------------------------------------
// 9. Evaluation accounting in benchmark-style SAM runs.
Criterion criterion_9() {
  Criterion c;
  const int n = 256;
  const Vector x0 = initial_point_alternating(n);
  for (int seed = 0; seed < 3; ++seed) {
    auto clean = std::make_shared<ModifiedRosenbrock>(n);
    NoiseModel noise{NoiseKind::gaussian, 0.025, 0.025, 0.0, 0};
    const CalibratedNoise cal = calibrate_noise(noise, *clean, x0);
    NoisyOracle oracle(clean, cal, derive_seed(62831, seed, 0));

    SamConfig sc;
    sc.r = 4;
    sc.m = 16;
    sc.alpha = 0.5;
    sc.delta0 = 10.0 * norm(x0);
    sc.tau = 0.1;
    sc.max_iter = 10;
    const OptimizationTrace trace = sam_optimize(oracle, x0, sc);

    c.require(trace.initial_evals == 1 + sc.m, "unexpected setup cost");
    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
      const IterationRecord& rec = trace.iterations[k];
      const long long prev =
          (k == 0) ? trace.initial_evals : trace.iterations[k - 1].evals;
      const long long expected = sc.m + 1 + (rec.accepted ? 0 : 1);
      c.require(rec.realized_m == sc.m, "sampling truncated unexpectedly");
      c.require(rec.evals - prev == expected,
                "iteration " + std::to_string(rec.iter) + " consumed " +
                    std::to_string(rec.evals - prev) + " evals, expected " +
                    std::to_string(expected));
    }
    c.require(trace.total_evals == oracle.eval_count(),
              "trace counter disagrees with the oracle");
  }
  c.note("m+1 (+1 on rejection) verified on 3 seeded runs");
  return c;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Criterion result;
  };
  double sam_median = 0.0;
  std::vector<Entry> entries;
  entries.push_back({1, "zero-noise spectral exactness", criterion_1()});
  entries.push_back({2, "eigenvalue study replication", criterion_2()});
  entries.push_back({3, "subproblem oracle equivalence", criterion_3()});
  entries.push_back({4, "gradient checks", criterion_4()});
  entries.push_back({5, "bias immunity", criterion_5()});
  entries.push_back({6, "variant comparison", criterion_6()});
  entries.push_back({7, "benchmark replication", criterion_7(&sam_median)});
  entries.push_back({8, "determinism", criterion_8()});
  entries.push_back({9, "evaluation accounting", criterion_9()});

  int failures = 0;
  for (const Entry& e : entries) {
    const std::string detail = e.result.detail.str();
    std::printf("[%s] criterion %d: %s%s%s\n",
                e.result.pass ? "PASS" : "FAIL", e.id, e.name,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!e.result.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
              entries.size());
  return failures;
}
