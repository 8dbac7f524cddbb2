#pragma once

#include "samopt/linalg.hpp"
#include "samopt/sampling.hpp"

namespace samopt {

enum class ModelVariant { step_average, directional };

/// Reduced quadratic model q(y) = f_bar + g_red^T y + (1/2) y^T diag(lambda) y
/// over the span of the eigenvector block V; trial points are center + V*y.
/// Nothing n x n is ever formed.
struct ReducedQuadraticModel {
  Vector center;   // x_bar for step_average, x0 for directional
  double f_bar = 0.0;
  Vector g_red;    // reduced gradient, length r
  Vector lambda;   // diagonal curvature, length r
  std::vector<Vector> V;  // r orthonormal columns in R^n
  ModelVariant variant = ModelVariant::step_average;
};

Vector mean_gradient(const SampleSet& samples);

/// Centers the model at the sample mean and uses the averaged gradient,
/// reduced through V.  f_bar is the mean of the sampled values.
ReducedQuadraticModel build_step_average(const SampleSet& samples,
                                         const Vector& lambda_r,
                                         const std::vector<Vector>& V);

/// Centers the model at x0 and builds the reduced gradient from function
/// differences along the Krylov directions:
///   g_red[k] = (1/alpha) * sum_j Vr(j,k) * (f_j - f_0),
/// using all m differences.  Reads no gradients, so any constant bias in the
/// gradient samples leaves the result bit-identical.
ReducedQuadraticModel build_directional(const SampleSet& samples,
                                        const Vector& lambda_r,
                                        const std::vector<Vector>& V,
                                        const Matrix& reduced_eigvecs,
                                        double alpha);

struct TrustRegionStep {
  Vector y;
  double predicted_decrease = 0.0;
  bool on_boundary = false;
  double sigma = 0.0;  // Lagrange multiplier of the radius constraint
};

/// Minimizes g^T y + (1/2) y^T diag(lambda) y over ||y|| <= Delta.  The
/// diagonal curvature makes the More-Sorensen approach explicit: components
/// are y_i = -g_i/(lambda_i + sigma), and the boundary multiplier solves the
/// secular equation ||y(sigma)|| = Delta by safeguarded Newton on
/// 1/||y|| - 1/Delta.  The hard case (no gradient along the most negative
/// curvature direction) adds a boundary-reaching component along it.
TrustRegionStep solve_trust_region_subproblem(const Vector& g_red,
                                              const Vector& lambda,
                                              double delta);

double model_value(const ReducedQuadraticModel& model, const Vector& y);

/// Full-space trial point center + V*y.
Vector apply_step(const ReducedQuadraticModel& model, const Vector& y);

}  // namespace samopt
