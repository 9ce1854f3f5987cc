#pragma once

#include <Eigen/Dense>

namespace sdcheck {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense real symmetric matrix. Construction symmetrizes the input and rejects
// inputs that are not symmetric up to 1e-9 relative, or contain NaN/Inf.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);
  explicit SymMatrix(const Matrix& a);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Vector& d);
  // Trusted path for internally computed products such as V*R*V^T: averages
  // with the transpose without the asymmetry check.
  static SymMatrix symmetrize(const Matrix& a);

  int order() const { return static_cast<int>(m_.rows()); }
  const Matrix& dense() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  double norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Matrix m_;
};

double inner(const SymMatrix& a, const SymMatrix& b);

// Eigenvalues sorted descending with matching orthonormal eigenvector columns.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

// Cyclic Jacobi. Rotations are skipped when |a_pq| is negligible relative to
// sqrt(|a_pp a_qq|), which keeps small eigenvalues of graded positive definite
// matrices relatively accurate.
EigenDecomposition eig_desc(const SymMatrix& x);
Vector eigvals_desc(const SymMatrix& x);

double dist_psd(const SymMatrix& x);
SymMatrix proj_psd(const SymMatrix& x);

int svec_length(int n);
// Inverse of svec_length; throws InvalidDimension if len is not triangular.
int smat_order(int len);
// Column-major lower triangle with off-diagonals scaled by sqrt(2).
Vector svec(const SymMatrix& x);
SymMatrix smat(const Vector& v);
SymMatrix smat(const Vector& v, int n);

}  // namespace sdcheck
