#include "samopt/sampling.hpp"

#include <cmath>
#include <utility>

namespace samopt {

ArnoldiResult arnoldi_sample(ObjectiveOracle& oracle, const Vector& x0,
                             double f0, const Vector& g0, int m, double alpha) {
  if (m < 1) throw std::invalid_argument("arnoldi: sample budget must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("arnoldi: alpha must be > 0");
  const double g0_norm = norm(g0);
  if (g0_norm == 0.0) throw ZeroGradientError();

  ArnoldiResult out;
  SampleSet& samples = out.samples;
  samples.alpha = alpha;
  samples.X.push_back(x0);
  samples.F.push_back(f0);
  samples.G.push_back(g0);

  std::vector<Vector> z;  // z_1 .. z_{j+1}
  z.push_back(scaled(g0, -1.0 / g0_norm));
  std::vector<Vector> h_columns;

  int realized = m;
  for (int j = 0; j < m; ++j) {
    Vector xj = x0;
    axpy(alpha, z[j], xj);
    const Eval sample = oracle.eval(xj);
    samples.X.push_back(std::move(xj));
    samples.F.push_back(sample.f);
    samples.G.push_back(sample.g);

    // Finite-difference Hessian-vector product along z_j.
    Vector w = subtract(sample.g, g0);
    for (double& v : w) v /= alpha;

    MgsResult mgs = mgs_orthogonalize(w, z);
    Vector column = std::move(mgs.coeffs);
    column.push_back(mgs.residual_norm);
    h_columns.push_back(std::move(column));
    if (mgs.breakdown) {
      realized = j + 1;
      break;
    }
    z.push_back(std::move(mgs.unit_residual));
  }
  samples.m = realized;

  SpectralEstimate& spectrum = out.spectrum;
  spectrum.m = realized;
  spectrum.hessenberg.m = realized;
  spectrum.hessenberg.h = Matrix(realized + 1, realized);
  for (int j = 0; j < realized; ++j)
    for (int i = 0; i <= j + 1; ++i)
      spectrum.hessenberg.h(i, j) = h_columns[j][i];

  spectrum.basis.assign(z.begin(), z.begin() + realized);

  const SymmetricEigen eigen =
      symmetric_eigendecomposition(spectrum.hessenberg.symmetric_part());
  spectrum.eigenvalues = eigen.eigenvalues;
  spectrum.reduced_eigvecs = eigen.eigenvectors;

  // Lift: V = Z * V_reduced.
  const int n = static_cast<int>(x0.size());
  spectrum.eigvecs.assign(realized, Vector(n, 0.0));
  for (int k = 0; k < realized; ++k)
    for (int i = 0; i < realized; ++i)
      axpy(eigen.eigenvectors(i, k), spectrum.basis[i], spectrum.eigvecs[k]);

  return out;
}

double eigenvalue_error(double estimate, double exact) {
  if (estimate == 0.0)
    throw std::domain_error("eigenvalue_error: zero estimate");
  return std::abs(exact / estimate - 1.0);
}

TruncatedSpectrum truncate_spectrum(const SpectralEstimate& spectrum, int r) {
  if (r < 1 || r > spectrum.m)
    throw std::invalid_argument("truncate_spectrum: rank out of range");
  TruncatedSpectrum out;
  out.eigenvalues.assign(spectrum.eigenvalues.begin(),
                         spectrum.eigenvalues.begin() + r);
  out.eigvecs.assign(spectrum.eigvecs.begin(), spectrum.eigvecs.begin() + r);
  return out;
}

}  // namespace samopt
