#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace samopt {

using Vector = std::vector<double>;

/// Dense row-major matrix, sized for the small (m <= 32) projected systems
/// this library works with.
class Matrix {
public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
              fill) {}

  static Matrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * cols_ + j];
  }

  Vector column(int j) const;
  const std::vector<double>& data() const { return data_; }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

// Elementwise kernels shared by the whole library.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
void axpy(double a, const Vector& x, Vector& y);  // y += a*x
Vector scaled(const Vector& x, double a);
Vector add(const Vector& a, const Vector& b);
Vector subtract(const Vector& a, const Vector& b);

/// Largest deviation of the columns from exact orthonormality: unit norms and
/// pairwise orthogonality are checked together.
double orthonormality_defect(const std::vector<Vector>& columns);

/// Projection coefficients h_{i,j} recorded while orthogonalizing Krylov
/// directions; (m+1) x m with one nonzero subdiagonal, h(j+1,j) >= 0.
struct HessenbergRecord {
  Matrix h;
  int m = 0;

  Matrix leading_block() const;   // the m x m upper block
  Matrix symmetric_part() const;  // (H + H^T)/2 of the leading block
};

struct MgsResult {
  Vector coeffs;         // projection removed against each basis column
  double residual_norm = 0.0;
  Vector unit_residual;  // empty on breakdown
  bool breakdown = false;
};

/// Sequentially projects v against the basis columns (modified Gram-Schmidt)
/// and normalizes what remains.  Breakdown is flagged when the residual norm
/// falls at or below breakdown_tol; the default tolerance is
/// 1e-12 * max(1, ||v||).
MgsResult mgs_orthogonalize(const Vector& v, const std::vector<Vector>& basis);
MgsResult mgs_orthogonalize(const Vector& v, const std::vector<Vector>& basis,
                            double breakdown_tol);

struct SymmetricEigen {
  Vector eigenvalues;   // sorted by |lambda| descending, ties by value
  Matrix eigenvectors;  // orthonormal columns aligned with eigenvalues
};

/// Cyclic Jacobi eigensolver for small symmetric matrices.  The input is
/// symmetrized as (S + S^T)/2 before rotating.  Each eigenvector is signed so
/// its largest-magnitude entry is positive.
SymmetricEigen symmetric_eigendecomposition(const Matrix& s);

/// Multiplies by the orthonormalized Sylvester Hadamard matrix, (1/sqrt(n)) H_n x,
/// computed in place in O(n log n).  The map is its own inverse.
Vector hadamard_apply(Vector x);

bool is_power_of_two(std::size_t n);

}  // namespace samopt
