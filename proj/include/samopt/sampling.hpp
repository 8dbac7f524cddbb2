#pragma once

#include <stdexcept>
#include <vector>

#include "samopt/linalg.hpp"
#include "samopt/problems.hpp"

namespace samopt {

/// Locations, values and gradients gathered by one Arnoldi sampling call.
/// Column 0 holds the supplied center data; columns 1..m sit at distance
/// alpha from the center along orthonormal directions.
struct SampleSet {
  std::vector<Vector> X;  // m+1 points, X[0] = x0
  Vector F;               // m+1 function values
  std::vector<Vector> G;  // m+1 gradients
  double alpha = 0.0;
  int m = 0;              // realized samples, possibly truncated by breakdown
};

/// Spectral information extracted from the symmetric part of the projected
/// Hessian: eigenvalues sorted by magnitude, their reduced eigenvectors, and
/// the lifted full-space eigenvectors V = Z * V_reduced.
struct SpectralEstimate {
  HessenbergRecord hessenberg;
  std::vector<Vector> basis;    // Z, m orthonormal columns in R^n
  Vector eigenvalues;           // m values, |lambda| descending
  Matrix reduced_eigvecs;       // m x m, columns aligned with eigenvalues
  std::vector<Vector> eigvecs;  // V, m columns in R^n
  int m = 0;
};

struct ArnoldiResult {
  SampleSet samples;
  SpectralEstimate spectrum;
};

struct ZeroGradientError : std::runtime_error {
  ZeroGradientError() : std::runtime_error("arnoldi: zero seed gradient") {}
};

/// Arnoldi sampling: starting from z1 = -g0/||g0||, repeatedly samples
/// x_j = x0 + alpha*z_j, forms the gradient difference (g_j - g0)/alpha, and
/// orthogonalizes it against all previous directions to extend the basis.
/// On breakdown the iteration truncates to the completed samples.  Consumes
/// exactly the realized number of samples in oracle evaluations; (f0, g0) are
/// supplied by the caller.
ArnoldiResult arnoldi_sample(ObjectiveOracle& oracle, const Vector& x0,
                             double f0, const Vector& g0, int m, double alpha);

/// Relative error |exact/estimate - 1| of an eigenvalue estimate, which is
/// also the relative error of the inverse eigenvalue.
double eigenvalue_error(double estimate, double exact);

struct TruncatedSpectrum {
  Vector eigenvalues;           // top r by magnitude
  std::vector<Vector> eigvecs;  // matching columns of V
};

/// Keeps the r largest-magnitude eigenpairs; ordering is already stable in
/// the estimate.
TruncatedSpectrum truncate_spectrum(const SpectralEstimate& spectrum, int r);

}  // namespace samopt
