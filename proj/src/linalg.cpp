#include "samopt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace samopt {

namespace {

constexpr double kBreakdownRelTol = 1e-12;
constexpr double kJacobiRelTol = 1e-12;
constexpr int kJacobiMaxSweeps = 100;

double off_diagonal_frobenius(const Matrix& a) {
  double sum = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

double frobenius(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector Matrix::column(int j) const {
  Vector c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: dimension mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector scaled(const Vector& x, double a) {
  Vector y(x);
  for (double& v : y) v *= a;
  return y;
}

Vector add(const Vector& a, const Vector& b) {
  Vector y(a);
  axpy(1.0, b, y);
  return y;
}

Vector subtract(const Vector& a, const Vector& b) {
  Vector y(a);
  axpy(-1.0, b, y);
  return y;
}

double orthonormality_defect(const std::vector<Vector>& columns) {
  double defect = 0.0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i; j < columns.size(); ++j) {
      const double target = (i == j) ? 1.0 : 0.0;
      defect = std::max(defect, std::abs(dot(columns[i], columns[j]) - target));
    }
  }
  return defect;
}

Matrix HessenbergRecord::leading_block() const {
  Matrix block(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) block(i, j) = h(i, j);
  return block;
}

Matrix HessenbergRecord::symmetric_part() const {
  Matrix block = leading_block();
  Matrix sym(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) sym(i, j) = 0.5 * (block(i, j) + block(j, i));
  return sym;
}

MgsResult mgs_orthogonalize(const Vector& v, const std::vector<Vector>& basis) {
  return mgs_orthogonalize(v, basis,
                           kBreakdownRelTol * std::max(1.0, norm(v)));
}

MgsResult mgs_orthogonalize(const Vector& v, const std::vector<Vector>& basis,
                            double breakdown_tol) {
  if (basis.empty()) throw std::invalid_argument("mgs: empty basis");
  for (const Vector& z : basis)
    if (z.size() != v.size())
      throw std::invalid_argument("mgs: dimension mismatch");

  MgsResult result;
  result.coeffs.assign(basis.size(), 0.0);
  Vector w = v;
  double before = norm(v);
  // Selective reorthogonalization: when the projection cancels most of the
  // vector, a single sweep leaves the residual visibly non-orthogonal, so
  // sweep again (two passes suffice).  Corrections accumulate into the
  // coefficients, keeping the reconstruction identity intact.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double c = dot(w, basis[i]);
      axpy(-c, basis[i], w);
      result.coeffs[i] += c;
    }
    result.residual_norm = norm(w);
    if (result.residual_norm > 0.5 * before ||
        result.residual_norm <= breakdown_tol)
      break;
    before = result.residual_norm;
  }
  if (result.residual_norm <= breakdown_tol) {
    result.breakdown = true;
    return result;
  }
  result.unit_residual = scaled(w, 1.0 / result.residual_norm);
  return result;
}

SymmetricEigen symmetric_eigendecomposition(const Matrix& s) {
  if (s.rows() != s.cols() || s.rows() == 0)
    throw std::invalid_argument("eigendecomposition: matrix must be square");
  for (double v : s.data())
    if (!std::isfinite(v))
      throw std::invalid_argument("eigendecomposition: non-finite entry");

  const int n = s.rows();
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.5 * (s(i, j) + s(j, i));

  Matrix v = Matrix::identity(n);
  const double tol = kJacobiRelTol * std::max(frobenius(a), 1e-300);

  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    if (off_diagonal_frobenius(a) <= tol) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0)
                             ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                             : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  // Order by |lambda| descending, ties by signed value descending.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&a](int lhs, int rhs) {
    const double la = a(lhs, lhs), lb = a(rhs, rhs);
    if (std::abs(la) != std::abs(lb)) return std::abs(la) > std::abs(lb);
    return la > lb;
  });

  SymmetricEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    const int src = order[j];
    out.eigenvalues[j] = a(src, src);
    int peak = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(peak, src))) peak = i;
    const double sign = (v(peak, src) < 0.0) ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) out.eigenvectors(i, j) = sign * v(i, src);
  }
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Vector hadamard_apply(Vector x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n))
    throw std::invalid_argument("hadamard_apply: length must be a power of two");
  for (std::size_t half = 1; half < n; half *= 2) {
    for (std::size_t block = 0; block < n; block += 2 * half) {
      for (std::size_t i = block; i < block + half; ++i) {
        const double a = x[i];
        const double b = x[i + half];
        x[i] = a + b;
        x[i + half] = a - b;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : x) v *= scale;
  return x;
}

}  // namespace samopt
