#include "samopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace samopt {

namespace {

// Tighter than the 1e-10 contract so that sigma*(Delta - ||y||) stays below
// the KKT residual budget even for large multipliers.
constexpr double kSecularRelTol = 1e-13;
constexpr int kSecularMaxIter = 100;

// ||y(sigma)|| with y_i = -g_i/(lambda_i + sigma); +inf when a component with
// nonzero gradient sits exactly on a singular shift.
double step_norm_at(const Vector& g, const Vector& lambda, double sigma) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double denom = lambda[i] + sigma;
    if (denom <= 0.0) {
      if (g[i] != 0.0) return std::numeric_limits<double>::infinity();
      continue;  // zero gradient on a singular shift contributes nothing
    }
    const double yi = g[i] / denom;
    sum += yi * yi;
  }
  return std::sqrt(sum);
}

Vector step_at(const Vector& g, const Vector& lambda, double sigma) {
  Vector y(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double denom = lambda[i] + sigma;
    if (denom > 0.0) y[i] = -g[i] / denom;
  }
  return y;
}

}  // namespace

Vector mean_gradient(const SampleSet& samples) {
  if (samples.G.empty()) throw std::invalid_argument("model: empty sample set");
  Vector mean(samples.G.front().size(), 0.0);
  for (const Vector& g : samples.G) axpy(1.0, g, mean);
  const double scale = 1.0 / static_cast<double>(samples.G.size());
  for (double& v : mean) v *= scale;
  return mean;
}

ReducedQuadraticModel build_step_average(const SampleSet& samples,
                                         const Vector& lambda_r,
                                         const std::vector<Vector>& V) {
  if (samples.X.empty()) throw std::invalid_argument("model: empty sample set");
  if (lambda_r.size() != V.size())
    throw std::invalid_argument("model: eigenpair count mismatch");

  ReducedQuadraticModel model;
  model.variant = ModelVariant::step_average;
  model.lambda = lambda_r;
  model.V = V;

  const double scale = 1.0 / static_cast<double>(samples.X.size());
  model.center.assign(samples.X.front().size(), 0.0);
  for (const Vector& x : samples.X) axpy(1.0, x, model.center);
  for (double& v : model.center) v *= scale;

  model.f_bar = 0.0;
  for (double f : samples.F) model.f_bar += f;
  model.f_bar *= scale;

  const Vector g_bar = mean_gradient(samples);
  model.g_red.resize(V.size());
  for (std::size_t k = 0; k < V.size(); ++k)
    model.g_red[k] = dot(V[k], g_bar);
  return model;
}

ReducedQuadraticModel build_directional(const SampleSet& samples,
                                        const Vector& lambda_r,
                                        const std::vector<Vector>& V,
                                        const Matrix& reduced_eigvecs,
                                        double alpha) {
  const int r = static_cast<int>(lambda_r.size());
  if (static_cast<int>(samples.F.size()) < r + 1)
    throw std::invalid_argument("model: insufficient samples for rank");
  if (lambda_r.size() != V.size())
    throw std::invalid_argument("model: eigenpair count mismatch");
  const int m = samples.m;
  if (reduced_eigvecs.rows() != m || reduced_eigvecs.cols() < r)
    throw std::invalid_argument("model: reduced eigenvector block mismatch");

  ReducedQuadraticModel model;
  model.variant = ModelVariant::directional;
  model.lambda = lambda_r;
  model.V = V;
  model.center = samples.X.front();
  model.f_bar = samples.F.front();

  model.g_red.assign(r, 0.0);
  for (int k = 0; k < r; ++k) {
    double acc = 0.0;
    for (int j = 0; j < m; ++j)
      acc += reduced_eigvecs(j, k) * (samples.F[j + 1] - samples.F[0]);
    model.g_red[k] = acc / alpha;
  }
  return model;
}

TrustRegionStep solve_trust_region_subproblem(const Vector& g_red,
                                              const Vector& lambda,
                                              double delta) {
  if (g_red.size() != lambda.size())
    throw std::invalid_argument("subproblem: dimension mismatch");
  if (g_red.empty()) throw std::invalid_argument("subproblem: empty model");
  if (!(delta > 0.0)) throw std::invalid_argument("subproblem: radius must be > 0");
  for (std::size_t i = 0; i < g_red.size(); ++i)
    if (!std::isfinite(g_red[i]) || !std::isfinite(lambda[i]))
      throw std::invalid_argument("subproblem: non-finite model");

  TrustRegionStep step;
  const double lambda_min = *std::min_element(lambda.begin(), lambda.end());
  const double sigma_low = std::max(0.0, -lambda_min);

  const double norm_low = step_norm_at(g_red, lambda, sigma_low);
  if (norm_low <= delta) {
    step.y = step_at(g_red, lambda, sigma_low);
    step.sigma = sigma_low;
    if (sigma_low == 0.0) {
      // Interior Newton step; components with zero curvature and zero
      // gradient stay at zero (minimal-norm solution).
      step.on_boundary = norm_low >= delta * (1.0 - 1e-12);
    } else {
      // Hard case: no gradient along the most negative curvature direction,
      // so push to the boundary along it.
      std::size_t k = 0;
      for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda[i] == lambda_min) { k = i; break; }
      step.y[k] += std::sqrt(std::max(0.0, delta * delta - norm_low * norm_low));
      step.on_boundary = true;
    }
  } else {
    // Secular equation: find sigma > sigma_low with ||y(sigma)|| = Delta.
    // phi(sigma) = 1/||y|| - 1/Delta is increasing and nearly linear.
    double lo = sigma_low;
    double hi = std::max(sigma_low + 1.0, norm(g_red) / delta - lambda_min);
    while (step_norm_at(g_red, lambda, hi) > delta) hi = 2.0 * hi + 1.0;

    double sigma = 0.5 * (lo + hi);
    double ny = step_norm_at(g_red, lambda, sigma);
    for (int it = 0; it < kSecularMaxIter; ++it) {
      if (std::abs(ny - delta) <= kSecularRelTol * delta) break;
      if (hi - lo <= 1e-15 * std::max(1.0, sigma)) break;
      if (std::isfinite(ny) && ny > delta) lo = sigma; else hi = sigma;

      double next = std::numeric_limits<double>::quiet_NaN();
      if (std::isfinite(ny) && ny > 0.0) {
        double d3 = 0.0;  // sum g_i^2/(lambda_i+sigma)^3
        for (std::size_t i = 0; i < g_red.size(); ++i) {
          const double denom = lambda[i] + sigma;
          if (denom > 0.0) d3 += (g_red[i] * g_red[i]) / (denom * denom * denom);
        }
        const double phi = 1.0 / ny - 1.0 / delta;
        const double dphi = d3 / (ny * ny * ny);
        if (dphi > 0.0) next = sigma - phi / dphi;
      }
      if (!std::isfinite(next) || next <= lo || next >= hi)
        next = 0.5 * (lo + hi);  // bisection safeguard
      sigma = next;
      ny = step_norm_at(g_red, lambda, sigma);
    }
    step.y = step_at(g_red, lambda, sigma);
    // Land exactly on the sphere; near the hard case the secular equation is
    // too steep to polish the norm through sigma alone.
    const double ny_final = norm(step.y);
    if (ny_final > 0.0)
      for (double& v : step.y) v *= delta / ny_final;
    step.sigma = sigma;
    step.on_boundary = true;
  }

  double quad = 0.0;
  for (std::size_t i = 0; i < g_red.size(); ++i)
    quad += g_red[i] * step.y[i] + 0.5 * lambda[i] * step.y[i] * step.y[i];
  step.predicted_decrease = std::max(0.0, -quad);
  return step;
}

double model_value(const ReducedQuadraticModel& model, const Vector& y) {
  if (y.size() != model.lambda.size())
    throw std::invalid_argument("model_value: dimension mismatch");
  double value = model.f_bar;
  for (std::size_t i = 0; i < y.size(); ++i)
    value += model.g_red[i] * y[i] + 0.5 * model.lambda[i] * y[i] * y[i];
  return value;
}

Vector apply_step(const ReducedQuadraticModel& model, const Vector& y) {
  if (y.size() != model.V.size())
    throw std::invalid_argument("apply_step: dimension mismatch");
  Vector x = model.center;
  for (std::size_t k = 0; k < y.size(); ++k) axpy(y[k], model.V[k], x);
  return x;
}

}  // namespace samopt
