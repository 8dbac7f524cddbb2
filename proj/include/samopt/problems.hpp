#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>

#include "samopt/linalg.hpp"

namespace samopt {

struct Eval {
  double f = 0.0;
  Vector g;
};

/// Base class for objective oracles.  Every eval() bumps the evaluation
/// counter by exactly one; deterministic oracles are pure functions of the
/// point.  An instance is meant to serve a single optimization run and is not
/// safe to share across threads.
class ObjectiveOracle {
public:
  explicit ObjectiveOracle(int dimension) : dimension_(dimension) {}
  virtual ~ObjectiveOracle() = default;

  Eval eval(const Vector& x);

  int dimension() const { return dimension_; }
  long long eval_count() const { return eval_count_; }

private:
  virtual Eval do_eval(const Vector& x) = 0;

  int dimension_;
  long long eval_count_ = 0;
};

/// F(x) = y^T Sigma y with y the orthonormalized Hadamard transform of x and
/// Sigma_ii = 1/i^q.  Both the value and gradient are formed matrix-free via
/// two Hadamard transforms.  The Hessian is 2 E Sigma E^T, so the exact i-th
/// Hessian eigenvalue is 2/i^q.
class SyntheticQuadratic : public ObjectiveOracle {
public:
  SyntheticQuadratic(int p, double q);

  int p() const { return p_; }
  double q() const { return q_; }

  /// Exact Hessian eigenvalue for 1-based index i, already sorted descending.
  double exact_hessian_eigenvalue(int i) const;

private:
  Eval do_eval(const Vector& x) override;

  int p_;
  double q_;
  Vector sigma_;  // Sigma_ii = 1/i^q
};

/// Multi-dimensional Rosenbrock with a 1/i scaling on each variable pair so
/// the Hessian spectrum decays.  Zero at the all-ones point.
class ModifiedRosenbrock : public ObjectiveOracle {
public:
  explicit ModifiedRosenbrock(int n);

private:
  Eval do_eval(const Vector& x) override;
};

/// Adapts an arbitrary callable into an oracle; handy for custom objectives
/// driven from tests or Python.
class CallbackOracle : public ObjectiveOracle {
public:
  CallbackOracle(int dimension, std::function<Eval(const Vector&)> fn)
      : ObjectiveOracle(dimension), fn_(std::move(fn)) {}

private:
  Eval do_eval(const Vector& x) override { return fn_(x); }

  std::function<Eval(const Vector&)> fn_;
};

enum class NoiseKind { none, gaussian };

/// Relative noise magnitudes; the absolute scales are frozen against the
/// clean objective at the run's initial point.
struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double rel_sigma_f = 0.0;  // fraction of |F(x0)|
  double rel_sigma_g = 0.0;  // fraction of ||grad F(x0)||
  double rel_bias_g = 0.0;   // per-component mean, fraction of ||grad F(x0)||
  std::uint64_t seed = 0;
};

struct CalibratedNoise {
  double sigma_f = 0.0;
  double sigma_g = 0.0;
  double mu_g = 0.0;
};

/// Seeded Gaussian stream.  Box-Muller on top of mt19937_64 keeps the draw
/// sequence fully determined by the seed, one pair of uniforms per normal.
class GaussianSampler {
public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
  std::mt19937_64 engine_;
};

/// Evaluates the clean oracle once at x0 and freezes the absolute noise
/// scales; they are never recalibrated at later iterates.
CalibratedNoise calibrate_noise(const NoiseModel& model,
                                ObjectiveOracle& clean_oracle,
                                const Vector& x0);

/// Adds one fresh draw per evaluation: f + N(0, sigma_f^2) and, per gradient
/// component, N(mu_g, sigma_g^2).  Draw order is f first, then components.
Eval apply_noise(const CalibratedNoise& noise, Eval clean,
                 GaussianSampler& rng);

/// Wraps a clean oracle with calibrated Gaussian noise.  Repeated evaluations
/// at the same point draw fresh noise, which the optimizer's resample step
/// relies on.
class NoisyOracle : public ObjectiveOracle {
public:
  NoisyOracle(std::shared_ptr<ObjectiveOracle> clean, CalibratedNoise noise,
              std::uint64_t seed)
      : ObjectiveOracle(clean->dimension()),
        clean_(std::move(clean)),
        noise_(noise),
        rng_(seed) {}

  const CalibratedNoise& noise() const { return noise_; }

private:
  Eval do_eval(const Vector& x) override;

  std::shared_ptr<ObjectiveOracle> clean_;
  CalibratedNoise noise_;
  GaussianSampler rng_;
};

// Initial points used throughout the experiments.
Vector initial_point_sin(int n);          // x_i = sin(i), 1-based
Vector initial_point_alternating(int n);  // -1 for odd i, 0 for even i

}  // namespace samopt
