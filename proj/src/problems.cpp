#include "samopt/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace samopt {

Eval ObjectiveOracle::eval(const Vector& x) {
  if (static_cast<int>(x.size()) != dimension_)
    throw std::invalid_argument("oracle: point dimension mismatch");
  ++eval_count_;
  return do_eval(x);
}

SyntheticQuadratic::SyntheticQuadratic(int p, double q)
    : ObjectiveOracle(1 << p), p_(p), q_(q) {
  if (p < 0 || p > 24) throw std::invalid_argument("quadratic: bad exponent p");
  sigma_.resize(dimension());
  for (int i = 0; i < dimension(); ++i)
    sigma_[i] = 1.0 / std::pow(static_cast<double>(i + 1), q_);
}

double SyntheticQuadratic::exact_hessian_eigenvalue(int i) const {
  if (i < 1 || i > dimension())
    throw std::invalid_argument("quadratic: eigenvalue index out of range");
  return 2.0 / std::pow(static_cast<double>(i), q_);
}

Eval SyntheticQuadratic::do_eval(const Vector& x) {
  Vector y = hadamard_apply(x);
  Eval out;
  Vector sy(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    out.f += sigma_[i] * y[i] * y[i];
    sy[i] = sigma_[i] * y[i];
  }
  out.g = hadamard_apply(std::move(sy));
  for (double& v : out.g) v *= 2.0;
  return out;
}

ModifiedRosenbrock::ModifiedRosenbrock(int n) : ObjectiveOracle(n) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("rosenbrock: dimension must be even");
}

Eval ModifiedRosenbrock::do_eval(const Vector& x) {
  Eval out;
  out.g.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size() / 2; ++i) {
    const double s = 1.0 / static_cast<double>(i + 1);
    const double a = x[2 * i];      // x_{2i-1} in 1-based terms
    const double b = x[2 * i + 1];  // x_{2i}
    const double d = b - a * a;
    out.f += s * (100.0 * d * d + (1.0 - a) * (1.0 - a));
    out.g[2 * i] = s * (-400.0 * a * d - 2.0 * (1.0 - a));
    out.g[2 * i + 1] = s * 200.0 * d;
  }
  return out;
}

double GaussianSampler::normal() {
  // u1 in (0,1], u2 in [0,1)
  const double u1 =
      (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

CalibratedNoise calibrate_noise(const NoiseModel& model,
                                ObjectiveOracle& clean_oracle,
                                const Vector& x0) {
  CalibratedNoise out;
  if (model.kind == NoiseKind::none) return out;
  const Eval base = clean_oracle.eval(x0);
  const double gnorm = norm(base.g);
  out.sigma_f = model.rel_sigma_f * std::abs(base.f);
  out.sigma_g = model.rel_sigma_g * gnorm;
  out.mu_g = model.rel_bias_g * gnorm;
  return out;
}

Eval apply_noise(const CalibratedNoise& noise, Eval clean,
                 GaussianSampler& rng) {
  clean.f += noise.sigma_f * rng.normal();
  for (double& gi : clean.g) gi += noise.mu_g + noise.sigma_g * rng.normal();
  return clean;
}

Eval NoisyOracle::do_eval(const Vector& x) {
  return apply_noise(noise_, clean_->eval(x), rng_);
}

Vector initial_point_sin(int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = std::sin(static_cast<double>(i + 1));
  return x;
}

Vector initial_point_alternating(int n) {
  Vector x(n);
  for (int i = 0; i < n; ++i) x[i] = (i % 2 == 0) ? -1.0 : 0.0;
  return x;
}

}  // namespace samopt
