#include "sdcheck/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "sdcheck/errors.hpp"

namespace sdcheck {

namespace {

constexpr double kRankTol = 1e-9;
constexpr double kDykstraTol = 1e-10;
constexpr int kDykstraMaxIter = 100000;

// Q with orthonormal columns spanning range(V), and U spanning the complement.
void orthonormal_split(const Matrix& v, Matrix* q, Matrix* u) {
  const int n = static_cast<int>(v.rows());
  const int r = static_cast<int>(v.cols());
  Eigen::HouseholderQR<Matrix> qr(v);
  const Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  *q = full.leftCols(r);
  *u = full.rightCols(n - r);
}

double dykstra_distance(const LinearMap& map, const SymMatrix& p) {
  SymMatrix x = p;
  SymMatrix inc_aff(p.order());
  SymMatrix inc_psd(p.order());
  for (int it = 0; it < kDykstraMaxIter; ++it) {
    const SymMatrix y = map.project_affine(x + inc_aff);
    inc_aff = x + inc_aff - y;
    const SymMatrix x_next = proj_psd(y + inc_psd);
    inc_psd = y + inc_psd - x_next;
    const double moved = (x_next - x).norm();
    x = x_next;
    if (moved <= kDykstraTol) break;
  }
  return (p - x).norm();
}

}  // namespace

LinearMap::LinearMap(int n, std::vector<SymMatrix> mats, Vector b)
    : n_(n), mats_(std::move(mats)), b_(std::move(b)) {
  if (n < 0) fail(Errc::kInvalidDimension, "negative order");
  if (b_.size() != static_cast<Eigen::Index>(mats_.size()))
    fail(Errc::kInvalidDimension, "rhs length differs from constraint count");
  if (!b_.allFinite()) fail(Errc::kInvalidMatrix, "rhs has non-finite entries");
  const int m = constraints();
  M_.resize(m, svec_length(n));
  for (int i = 0; i < m; ++i) {
    if (mats_[i].order() != n) fail(Errc::kInvalidDimension, "constraint matrix order mismatch");
    M_.row(i) = svec(mats_[i]).transpose();
  }
  if (m > 0) {
    Eigen::BDCSVD<Matrix> svd(M_);
    const Vector s = svd.singularValues();
    surjective_ = s.size() == m && s(0) > 0 && s(m - 1) >= kRankTol * s(0);
    auto cod = std::make_shared<Eigen::CompleteOrthogonalDecomposition<Matrix>>();
    cod->setThreshold(1e-10);
    cod->compute(M_);
    cod_ = cod;
  }
}

Vector LinearMap::apply(const SymMatrix& x) const {
  if (x.order() != n_) fail(Errc::kInvalidDimension, "order mismatch in apply");
  return M_ * svec(x);
}

SymMatrix LinearMap::adjoint(const Vector& y) const {
  if (y.size() != constraints()) fail(Errc::kInvalidDimension, "multiplier length mismatch");
  Matrix out = Matrix::Zero(n_, n_);
  for (int i = 0; i < constraints(); ++i) out += y(i) * mats_[i].dense();
  return SymMatrix::symmetrize(out);
}

Vector LinearMap::min_norm_correction(const Vector& r) const {
  if (r.size() != constraints()) fail(Errc::kInvalidDimension, "residual length mismatch");
  if (constraints() == 0) return Vector::Zero(svec_length(n_));
  const Vector d = cod_->solve(r);
  const double scale = std::max({1.0, r.norm(), b_.norm()});
  if ((M_ * d - r).norm() > 1e-8 * scale)
    fail(Errc::kInfeasibleAffine, "right-hand side is outside the range of the map");
  return d;
}

SymMatrix LinearMap::project_affine(const SymMatrix& x) const {
  return smat(svec(x) + min_norm_correction(b_ - apply(x)), n_);
}

void FaceRep::validate() const {
  if (W.order() != order()) fail(Errc::kInvalidSpec, "face W/V order mismatch");
  const double scale = std::max(1.0, W.norm());
  if ((W.dense() * V).norm() > 1e-9 * scale) fail(Errc::kInvalidSpec, "face: W V != 0");
  const SymMatrix s = SymMatrix::symmetrize(W.dense() + V * V.transpose());
  const Vector lam = eigvals_desc(s);
  if (lam.size() > 0 && lam(lam.size() - 1) <= 1e-10 * std::max(1.0, lam(0)))
    fail(Errc::kInvalidSpec, "face: W + V V^T is not positive definite");
}

Spectrahedron fold_objective(const Spectrahedron& f, const SymMatrix& c, double p_star) {
  std::vector<SymMatrix> mats = f.map.mats();
  mats.push_back(c);
  Vector b(f.map.constraints() + 1);
  b << f.map.rhs(), p_star;
  Spectrahedron out = f;
  out.map = LinearMap(f.order(), std::move(mats), std::move(b));
  return out;
}

double backward_error(const Spectrahedron& f, const SymMatrix& x) {
  const Vector d = f.map.min_norm_correction(f.map.rhs() - f.map.apply(x));
  return d.norm() + dist_psd(x);
}

double forward_error(const Spectrahedron& f, const SymMatrix& x) {
  if (x.order() != f.order()) fail(Errc::kInvalidDimension, "order mismatch");
  if (!f.certificate) fail(Errc::kOracleUnavailable, "instance has no certificate");
  const Certificate& c = *f.certificate;
  if (c.singleton_solution) return (x - *c.singleton_solution).norm();
  if (!c.solution_face) fail(Errc::kOracleUnavailable, "certificate has no solution face");

  const FaceRep& face = *c.solution_face;
  if (face.rank() == 0) return x.norm();
  Matrix q, u;
  orthonormal_split(face.V, &q, &u);
  const Matrix& xd = x.dense();
  const double off = (q.transpose() * xd * u).squaredNorm();
  const double outer = (u.transpose() * xd * u).squaredNorm();
  const SymMatrix p = SymMatrix::symmetrize(q.transpose() * xd * q);
  const Reduction red = reduce(f.map, q);
  const double inner_dist = dykstra_distance(red.map, p);
  return std::sqrt(outer + 2.0 * off + inner_dist * inner_dist);
}

Reduction reduce(const LinearMap& map, const Matrix& v) {
  if (v.rows() != map.order()) fail(Errc::kInvalidDimension, "face basis row count mismatch");
  const int r = static_cast<int>(v.cols());
  if (r == 0) fail(Errc::kEmptyFace, "face basis has no columns");
  const int m = map.constraints();

  std::vector<SymMatrix> all;
  all.reserve(m);
  Matrix rows(m, svec_length(r));
  for (int i = 0; i < m; ++i) {
    all.push_back(SymMatrix::symmetrize(v.transpose() * map.mats()[i].dense() * v));
    rows.row(i) = svec(all.back()).transpose();
  }

  Reduction out;
  int rank = 0;
  Eigen::VectorXi perm;
  if (m > 0) {
    Eigen::ColPivHouseholderQR<Matrix> qr(rows.transpose());
    const Matrix rr = qr.matrixR().template triangularView<Eigen::Upper>();
    const double top = rr.rows() > 0 ? std::abs(rr(0, 0)) : 0.0;
    const int kmax = static_cast<int>(std::min(rr.rows(), rr.cols()));
    while (rank < kmax && top > 0 && std::abs(rr(rank, rank)) > kRankTol * top) ++rank;
    perm = qr.colsPermutation().indices();
  }
  for (int k = 0; k < rank; ++k) out.kept.push_back(perm(k));
  std::sort(out.kept.begin(), out.kept.end());
  for (int i = 0; i < m; ++i)
    if (std::find(out.kept.begin(), out.kept.end(), i) == out.kept.end()) out.dropped.push_back(i);

  std::vector<SymMatrix> mats;
  Vector b(out.kept.size());
  Matrix kept_rows(out.kept.size(), svec_length(r));
  for (size_t k = 0; k < out.kept.size(); ++k) {
    mats.push_back(all[out.kept[k]]);
    b(k) = map.rhs()(out.kept[k]);
    kept_rows.row(k) = rows.row(out.kept[k]);
  }
  out.dropped_combination = Matrix::Zero(out.dropped.size(), out.kept.size());
  for (size_t j = 0; j < out.dropped.size(); ++j) {
    const int i = out.dropped[j];
    double predicted = 0.0;
    if (!out.kept.empty()) {
      const Vector coef =
          kept_rows.transpose().colPivHouseholderQr().solve(rows.row(i).transpose());
      out.dropped_combination.row(j) = coef.transpose();
      predicted = coef.dot(b);
    }
    out.rhs_inconsistency = std::max(out.rhs_inconsistency, std::abs(map.rhs()(i) - predicted));
  }
  out.map = LinearMap(r, std::move(mats), std::move(b));
  return out;
}

ExposureCheck is_exposing(const Spectrahedron& f, const SymMatrix& w,
                          const std::vector<SymMatrix>& samples) {
  if (w.order() != f.order()) fail(Errc::kInvalidDimension, "order mismatch");
  for (const SymMatrix& s : samples)
    if (backward_error(f, s) > 1e-8) fail(Errc::kInvalidSample, "sample is not feasible");
  const double wn = w.norm();
  if (wn == 0.0) return {true, true};
  const Vector lam = eigvals_desc(w);
  if (lam(lam.size() - 1) < -1e-9) return {false, false};
  for (const SymMatrix& s : samples)
    if (std::abs(inner(w, s)) > 1e-8 * wn * std::max(1.0, s.norm())) return {false, false};
  return {true, false};
}

std::vector<SymMatrix> certified_samples(const Spectrahedron& f) {
  std::vector<SymMatrix> out;
  if (!f.certificate) return out;
  if (f.certificate->singleton_solution) out.push_back(*f.certificate->singleton_solution);
  if (f.certificate->relint_point) out.push_back(*f.certificate->relint_point);
  return out;
}

}  // namespace sdcheck
