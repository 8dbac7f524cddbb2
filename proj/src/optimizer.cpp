#include "samopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace samopt {

namespace {

constexpr double kAcceptThreshold = 1e-4;
constexpr double kShrinkThreshold = 0.1;
constexpr double kExpandThreshold = 0.75;
// A step counts as hitting the boundary when it reaches 99% of the radius.
constexpr double kBoundaryFraction = 0.99;

void validate_sam_config(const SamConfig& config) {
  if (config.r < 1 || config.m < config.r)
    throw std::invalid_argument("sam: require 1 <= r <= m");
  if (!(config.alpha > 0.0) || !(config.delta0 > 0.0) || !(config.tau > 0.0))
    throw std::invalid_argument("sam: radii and tolerance must be positive");
  if (config.max_iter < 1)
    throw std::invalid_argument("sam: max_iter must be >= 1");
}

}  // namespace

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::converged: return "converged";
    case TerminationReason::max_iterations: return "max_iterations";
    case TerminationReason::breakdown: return "breakdown";
    case TerminationReason::gradient_tolerance: return "gradient_tolerance";
    case TerminationReason::eval_budget: return "eval_budget";
    case TerminationReason::line_search_failure: return "line_search_failure";
    case TerminationReason::simplex_tolerance: return "simplex_tolerance";
  }
  return "unknown";
}

OptimizationTrace sam_optimize(ObjectiveOracle& oracle, const Vector& x0,
                               const SamConfig& config) {
  validate_sam_config(config);
  const double delta_max =
      config.delta_max > 0.0 ? config.delta_max : 100.0 * config.delta0;
  double delta = std::min(config.delta0, delta_max);

  OptimizationTrace trace;
  const long long base_evals = oracle.eval_count();
  Vector x = x0;
  Eval cur = oracle.eval(x);
  trace.initial_f = cur.f;

  ArnoldiResult arn;
  bool have_samples = false;
  try {
    arn = arnoldi_sample(oracle, x, cur.f, cur.g, config.m, config.alpha);
    have_samples = true;
  } catch (const ZeroGradientError&) {
    trace.reason = TerminationReason::breakdown;
  }
  trace.initial_evals = oracle.eval_count() - base_evals;

  for (int iter = 1; have_samples && iter <= config.max_iter; ++iter) {
    const int r_eff = std::min(config.r, arn.spectrum.m);
    const TruncatedSpectrum top = truncate_spectrum(arn.spectrum, r_eff);
    ReducedQuadraticModel model;
    double model_grad_norm = 0.0;
    if (config.variant == ModelVariant::step_average) {
      model = build_step_average(arn.samples, top.eigenvalues, top.eigvecs);
      model_grad_norm = norm(mean_gradient(arn.samples));
    } else {
      model = build_directional(arn.samples, top.eigenvalues, top.eigvecs,
                                arn.spectrum.reduced_eigvecs, config.alpha);
      model_grad_norm = norm(model.g_red);
    }
    if (model_grad_norm <= config.tau) {
      trace.reason = TerminationReason::converged;
      break;
    }

    const TrustRegionStep step =
        solve_trust_region_subproblem(model.g_red, model.lambda, delta);
    const Vector x_new = apply_step(model, step.y);
    const Eval trial = oracle.eval(x_new);

    // rho = -1 marks a degenerate model with no predicted decrease.
    const double rho = step.predicted_decrease > 0.0
                           ? (cur.f - trial.f) / step.predicted_decrease
                           : -1.0;
    const double used_delta = delta;
    if (rho < kShrinkThreshold) {
      delta *= 0.25;
    } else if (rho > kExpandThreshold &&
               norm(step.y) >= kBoundaryFraction * delta) {
      delta = std::min(2.0 * delta, delta_max);
    }

    const bool accepted = rho > kAcceptThreshold;
    if (accepted) {
      x = x_new;
      cur = trial;
    } else {
      cur = oracle.eval(x);  // resample the noise at the kept iterate
    }

    IterationRecord rec;
    rec.iter = iter;
    rec.f = cur.f;
    rec.model_grad_norm = model_grad_norm;
    rec.trust_radius = used_delta;
    rec.rho = rho;
    rec.predicted_decrease = step.predicted_decrease;
    rec.step_norm = norm(step.y);
    rec.accepted = accepted;

    try {
      arn = arnoldi_sample(oracle, x, cur.f, cur.g, config.m, config.alpha);
      rec.realized_m = arn.samples.m;
    } catch (const ZeroGradientError&) {
      have_samples = false;
      trace.reason = TerminationReason::breakdown;
    }
    rec.x = x;
    rec.evals = oracle.eval_count() - base_evals;
    trace.iterations.push_back(std::move(rec));

    if (iter == config.max_iter && have_samples)
      trace.reason = TerminationReason::max_iterations;
  }

  trace.final_point = x;
  trace.final_f = cur.f;
  trace.total_evals = oracle.eval_count() - base_evals;
  return trace;
}

namespace {

struct LineSearchResult {
  bool success = false;
  bool budget_exhausted = false;
  double alpha = 0.0;
  Eval at;
};

// Strong-Wolfe line search: bracketing phase plus bisection zoom.
LineSearchResult wolfe_line_search(ObjectiveOracle& oracle, const Vector& x,
                                   const Vector& p, double f0, double dphi0,
                                   const BfgsConfig& config,
                                   long long evals_left) {
  LineSearchResult result;
  int evals_allowed =
      static_cast<int>(std::min<long long>(config.max_line_search_evals,
                                           std::max<long long>(evals_left, 0)));
  if (evals_allowed == 0) {
    result.budget_exhausted = true;
    return result;
  }

  const auto phi = [&](double a) {
    Vector xa = x;
    axpy(a, p, xa);
    return oracle.eval(xa);
  };

  double a_lo = 0.0, f_lo = f0, a_hi = 0.0;
  bool bracketed = false;

  double a_prev = 0.0, f_prev = f0;
  double a = 1.0;
  int used = 0;
  while (used < evals_allowed) {
    Eval e = phi(a);
    ++used;
    const double dphi = dot(e.g, p);
    if (e.f > f0 + config.c1 * a * dphi0 || (used > 1 && e.f >= f_prev)) {
      a_lo = a_prev; f_lo = f_prev; a_hi = a;
      bracketed = true;
      break;
    }
    if (std::abs(dphi) <= -config.c2 * dphi0) {
      result.success = true;
      result.alpha = a;
      result.at = std::move(e);
      return result;
    }
    if (dphi >= 0.0) {
      a_lo = a; f_lo = e.f; a_hi = a_prev;
      bracketed = true;
      break;
    }
    a_prev = a; f_prev = e.f;
    a = std::min(2.0 * a, 1e6);
  }
  if (!bracketed) {
    result.budget_exhausted = used >= evals_allowed && evals_left <= used;
    return result;
  }

  while (used < evals_allowed) {
    a = 0.5 * (a_lo + a_hi);
    if (std::abs(a_hi - a_lo) < 1e-14 * std::max(1.0, std::abs(a_lo))) break;
    Eval e = phi(a);
    ++used;
    if (e.f > f0 + config.c1 * a * dphi0 || e.f >= f_lo) {
      a_hi = a;
      continue;
    }
    const double dphi = dot(e.g, p);
    if (std::abs(dphi) <= -config.c2 * dphi0) {
      result.success = true;
      result.alpha = a;
      result.at = std::move(e);
      return result;
    }
    if (dphi * (a_hi - a_lo) >= 0.0) a_hi = a_lo;
    a_lo = a; f_lo = e.f;
  }
  result.budget_exhausted = used >= evals_allowed && evals_left <= used;
  return result;
}

}  // namespace

OptimizationTrace bfgs_optimize(ObjectiveOracle& oracle, const Vector& x0,
                                const BfgsConfig& config) {
  const int n = static_cast<int>(x0.size());
  OptimizationTrace trace;
  const long long base_evals = oracle.eval_count();

  Vector x = x0;
  Eval cur = oracle.eval(x);
  trace.initial_f = cur.f;
  trace.initial_evals = 1;
  Matrix h = Matrix::identity(n);

  trace.reason = TerminationReason::eval_budget;
  int iter = 0;
  while (true) {
    const double gnorm = norm(cur.g);
    if (gnorm <= config.grad_tol) {
      trace.reason = TerminationReason::gradient_tolerance;
      break;
    }
    const long long used = oracle.eval_count() - base_evals;
    if (used >= config.max_evals) {
      trace.reason = TerminationReason::eval_budget;
      break;
    }

    Vector p(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc -= h(i, j) * cur.g[j];
      p[i] = acc;
    }
    double dphi0 = dot(cur.g, p);
    if (dphi0 >= 0.0) {
      // Curvature information went bad; restart from steepest descent.
      h = Matrix::identity(n);
      p = scaled(cur.g, -1.0);
      dphi0 = -gnorm * gnorm;
    }

    LineSearchResult ls = wolfe_line_search(oracle, x, p, cur.f, dphi0, config,
                                            config.max_evals - used);
    if (!ls.success) {
      trace.reason = ls.budget_exhausted ? TerminationReason::eval_budget
                                         : TerminationReason::line_search_failure;
      break;
    }

    Vector s = scaled(p, ls.alpha);
    Vector y = subtract(ls.at.g, cur.g);
    const double sy = dot(s, y);
    if (sy > 1e-10 * norm(s) * norm(y)) {
      const double rho_bfgs = 1.0 / sy;
      Vector hy(n, 0.0);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += h(i, j) * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double c = rho_bfgs * rho_bfgs * yhy + rho_bfgs;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          h(i, j) += -rho_bfgs * (s[i] * hy[j] + hy[i] * s[j]) + c * s[i] * s[j];
    }

    axpy(1.0, s, x);
    cur = std::move(ls.at);
    ++iter;

    IterationRecord rec;
    rec.iter = iter;
    rec.x = x;
    rec.f = cur.f;
    rec.model_grad_norm = norm(cur.g);
    rec.trust_radius = ls.alpha;
    rec.step_norm = norm(s);
    rec.accepted = true;
    rec.evals = oracle.eval_count() - base_evals;
    trace.iterations.push_back(std::move(rec));
  }

  trace.final_point = x;
  trace.final_f = cur.f;
  trace.total_evals = oracle.eval_count() - base_evals;
  return trace;
}

void nelder_mead_shrink(std::vector<Vector>& simplex, int best, double sigma) {
  for (int i = 0; i < static_cast<int>(simplex.size()); ++i) {
    if (i == best) continue;
    for (std::size_t k = 0; k < simplex[i].size(); ++k)
      simplex[i][k] =
          simplex[best][k] + sigma * (simplex[i][k] - simplex[best][k]);
  }
}

OptimizationTrace nelder_mead_optimize(ObjectiveOracle& oracle,
                                       const Vector& x0,
                                       const NelderMeadConfig& config) {
  const int n = static_cast<int>(x0.size());
  OptimizationTrace trace;
  const long long base_evals = oracle.eval_count();
  bool budget_hit = false;

  const auto value_at = [&](const Vector& v) -> double {
    if (oracle.eval_count() - base_evals >= config.max_evals) {
      budget_hit = true;
      return std::numeric_limits<double>::quiet_NaN();
    }
    return oracle.eval(v).f;
  };

  // x0 is one vertex; the others perturb one coordinate by 5% (or +0.05 at
  // zero coordinates).
  std::vector<Vector> simplex;
  simplex.reserve(n + 1);
  simplex.push_back(x0);
  for (int i = 0; i < n; ++i) {
    Vector v = x0;
    v[i] += (v[i] != 0.0) ? config.simplex_scale * v[i] : config.simplex_scale;
    simplex.push_back(std::move(v));
  }

  std::vector<double> values(n + 1,
                             std::numeric_limits<double>::infinity());
  for (int i = 0; i <= n && !budget_hit; ++i) {
    const double f = value_at(simplex[i]);
    if (!budget_hit) values[i] = f;
  }

  trace.initial_f = values[0];
  trace.initial_evals = oracle.eval_count() - base_evals;
  trace.reason = TerminationReason::eval_budget;

  std::vector<int> order(n + 1);
  const auto sort_order = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return values[a] < values[b]; });
  };

  int iter = 0;
  while (!budget_hit) {
    sort_order();
    const int best = order[0];
    const int worst = order[n];
    const int second_worst = order[n - 1];

    double size = 0.0;
    for (int i = 0; i <= n; ++i) {
      if (i == best) continue;
      size = std::max(size, norm(subtract(simplex[i], simplex[best])));
    }
    if (size <= config.size_tol) {
      trace.reason = TerminationReason::simplex_tolerance;
      break;
    }

    Vector centroid(n, 0.0);
    for (int i = 0; i <= n; ++i)
      if (i != worst) axpy(1.0, simplex[i], centroid);
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto along = [&](double t) {
      // centroid + t*(centroid - worst)
      Vector v = centroid;
      for (int k = 0; k < n; ++k) v[k] += t * (centroid[k] - simplex[worst][k]);
      return v;
    };

    Vector reflected = along(1.0);
    const double f_reflected = value_at(reflected);
    if (budget_hit) break;

    bool shrink = false;
    if (f_reflected < values[best]) {
      Vector expanded = along(2.0);
      const double f_expanded = value_at(expanded);
      if (budget_hit) break;
      if (f_expanded < f_reflected) {
        simplex[worst] = std::move(expanded);
        values[worst] = f_expanded;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = f_reflected;
      }
    } else if (f_reflected < values[second_worst]) {
      simplex[worst] = std::move(reflected);
      values[worst] = f_reflected;
    } else if (f_reflected < values[worst]) {
      Vector contracted = along(0.5);  // outside contraction
      const double f_contracted = value_at(contracted);
      if (budget_hit) break;
      if (f_contracted <= f_reflected) {
        simplex[worst] = std::move(contracted);
        values[worst] = f_contracted;
      } else {
        shrink = true;
      }
    } else {
      Vector contracted = along(-0.5);  // inside contraction
      const double f_contracted = value_at(contracted);
      if (budget_hit) break;
      if (f_contracted < values[worst]) {
        simplex[worst] = std::move(contracted);
        values[worst] = f_contracted;
      } else {
        shrink = true;
      }
    }

    if (shrink) {
      nelder_mead_shrink(simplex, best, 0.5);
      for (int i = 0; i <= n && !budget_hit; ++i) {
        if (i == best) continue;
        const double f = value_at(simplex[i]);
        if (!budget_hit) values[i] = f;
      }
      if (budget_hit) break;
    }

    ++iter;
    sort_order();
    IterationRecord rec;
    rec.iter = iter;
    rec.x = simplex[order[0]];
    rec.f = values[order[0]];
    rec.step_norm = size;
    rec.accepted = true;
    rec.evals = oracle.eval_count() - base_evals;
    trace.iterations.push_back(std::move(rec));
  }

  // Best vertex among those actually evaluated.
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (values[i] < values[best]) best = i;
  trace.final_point = simplex[best];
  trace.final_f = values[best];
  trace.total_evals = oracle.eval_count() - base_evals;
  return trace;
}

}  // namespace samopt
