#pragma once

#include <string>

#include "samopt/model.hpp"
#include "samopt/problems.hpp"
#include "samopt/sampling.hpp"

namespace samopt {

struct SamConfig {
  int r = 4;                // model rank
  int m = 16;               // Arnoldi iterations per outer iteration
  double alpha = 1.0;       // sample radius
  double delta0 = 1.0;      // initial trust radius
  double delta_max = 0.0;   // cap; <= 0 means 100 * delta0
  double tau = 1e-6;        // tolerance on the model gradient norm
  int max_iter = 100;
  ModelVariant variant = ModelVariant::step_average;
};

enum class TerminationReason {
  converged,
  max_iterations,
  breakdown,
  gradient_tolerance,
  eval_budget,
  line_search_failure,
  simplex_tolerance,
};

std::string to_string(TerminationReason reason);

struct IterationRecord {
  int iter = 0;
  Vector x;                     // iterate at the end of the iteration
  double f = 0.0;               // noisy objective carried at that iterate
  double model_grad_norm = 0.0;
  double trust_radius = 0.0;    // radius used this iteration (step length for
                                // line-search methods)
  double rho = 0.0;             // actual/predicted reduction ratio
  double predicted_decrease = 0.0;
  double step_norm = 0.0;
  bool accepted = false;
  long long evals = 0;          // cumulative oracle evaluations
  int realized_m = 0;           // samples consumed by Arnoldi this iteration
};

struct OptimizationTrace {
  std::vector<IterationRecord> iterations;
  Vector final_point;
  double final_f = 0.0;
  double initial_f = 0.0;  // first (noisy) objective value seen
  TerminationReason reason = TerminationReason::max_iterations;
  long long total_evals = 0;
  long long initial_evals = 0;  // evaluations spent before the first iteration
};

/// Stochastic Arnoldi trust-region loop.  Each pass consumes one trial
/// evaluation, one extra evaluation when the step is rejected (the objective
/// is resampled at the kept iterate), and m evaluations to refresh the
/// Arnoldi samples.
OptimizationTrace sam_optimize(ObjectiveOracle& oracle, const Vector& x0,
                               const SamConfig& config);

struct BfgsConfig {
  long long max_evals = 1000;
  double grad_tol = 1e-8;
  double c1 = 1e-4;  // Armijo
  double c2 = 0.9;   // Wolfe curvature
  int max_line_search_evals = 25;
};

/// Dense inverse-Hessian BFGS with a strong-Wolfe line search.  A failed line
/// search terminates the run and is recorded as such; with noisy data this is
/// the expected stall mode.
OptimizationTrace bfgs_optimize(ObjectiveOracle& oracle, const Vector& x0,
                                const BfgsConfig& config);

struct NelderMeadConfig {
  long long max_evals = 1000;
  double simplex_scale = 0.05;  // relative initial perturbation per coordinate
  double size_tol = 1e-10;      // max vertex distance from the best vertex
};

/// Standard reflection/expansion/contraction/shrink simplex method.  Only
/// function values are read; x0 is one vertex of the initial simplex and the
/// remaining vertices perturb one coordinate each.
OptimizationTrace nelder_mead_optimize(ObjectiveOracle& oracle,
                                       const Vector& x0,
                                       const NelderMeadConfig& config);

/// Shrinks every vertex toward the best one: v <- best + sigma*(v - best).
void nelder_mead_shrink(std::vector<Vector>& simplex, int best, double sigma);

}  // namespace samopt
