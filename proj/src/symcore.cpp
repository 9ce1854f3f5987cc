#include "sdcheck/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "sdcheck/errors.hpp"

namespace sdcheck {

namespace {

constexpr int kMaxSweeps = 80;
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

SymMatrix::SymMatrix(int n) : m_(Matrix::Zero(n, n)) {
  if (n < 0) fail(Errc::kInvalidDimension, "negative order");
}

SymMatrix::SymMatrix(const Matrix& a) {
  if (a.rows() != a.cols()) fail(Errc::kInvalidDimension, "matrix is not square");
  if (!a.allFinite()) fail(Errc::kInvalidMatrix, "matrix has non-finite entries");
  const double asym = (a - a.transpose()).norm();
  if (asym > 1e-9 * a.norm()) fail(Errc::kInvalidMatrix, "matrix is not symmetric");
  m_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SymMatrix SymMatrix::symmetrize(const Matrix& a) {
  if (a.rows() != a.cols()) fail(Errc::kInvalidDimension, "matrix is not square");
  if (!a.allFinite()) fail(Errc::kInvalidMatrix, "matrix has non-finite entries");
  SymMatrix s;
  s.m_ = 0.5 * (a + a.transpose());
  return s;
}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (o.order() != order()) fail(Errc::kInvalidDimension, "order mismatch");
  return symmetrize(m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (o.order() != order()) fail(Errc::kInvalidDimension, "order mismatch");
  return symmetrize(m_ - o.m_);
}

SymMatrix SymMatrix::operator*(double s) const { return symmetrize(m_ * s); }

double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) fail(Errc::kInvalidDimension, "order mismatch");
  return a.dense().cwiseProduct(b.dense()).sum();
}

EigenDecomposition eig_desc(const SymMatrix& x) {
  const int n = x.order();
  Matrix a = x.dense();
  Matrix v = Matrix::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        const double app = a(p, p);
        const double aqq = a(q, q);
        if (std::abs(apq) <= eps * std::sqrt(std::abs(app * aqq)) || std::abs(apq) <= tiny) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });
  EigenDecomposition out{Vector(n), Matrix(n, n)};
  for (int i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

Vector eigvals_desc(const SymMatrix& x) { return eig_desc(x).values; }

double dist_psd(const SymMatrix& x) {
  const Vector lam = eigvals_desc(x);
  return lam.cwiseMin(0.0).norm();
}

SymMatrix proj_psd(const SymMatrix& x) {
  const EigenDecomposition e = eig_desc(x);
  const Vector clipped = e.values.cwiseMax(0.0);
  return SymMatrix::symmetrize(e.vectors * clipped.asDiagonal() * e.vectors.transpose());
}

int svec_length(int n) { return n * (n + 1) / 2; }

int smat_order(int len) {
  const int n = static_cast<int>(std::lround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  if (n < 0 || svec_length(n) != len) fail(Errc::kInvalidDimension, "length is not triangular");
  return n;
}

Vector svec(const SymMatrix& x) {
  const int n = x.order();
  Vector out(svec_length(n));
  int t = 0;
  for (int j = 0; j < n; ++j) {
    out(t++) = x(j, j);
    for (int i = j + 1; i < n; ++i) out(t++) = kSqrt2 * x(i, j);
  }
  return out;
}

SymMatrix smat(const Vector& v) { return smat(v, smat_order(static_cast<int>(v.size()))); }

SymMatrix smat(const Vector& v, int n) {
  if (v.size() != svec_length(n)) fail(Errc::kInvalidDimension, "svec length mismatch");
  Matrix m(n, n);
  int t = 0;
  for (int j = 0; j < n; ++j) {
    m(j, j) = v(t++);
    for (int i = j + 1; i < n; ++i) m(i, j) = m(j, i) = v(t++) / kSqrt2;
  }
  return SymMatrix::symmetrize(m);
}

}  // namespace sdcheck
