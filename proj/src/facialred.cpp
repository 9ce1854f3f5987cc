#include "sdcheck/facialred.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sdcheck {

namespace {

enum class Slater { kHolds, kFails, kUndecided };

// min over the last `window` transitions of eigs(k+1, i) / eigs(k, i).
Vector tail_proxy(const Matrix& eigs, int window) {
  const int kk = static_cast<int>(eigs.rows());
  Vector out = Vector::Constant(eigs.cols(), std::numeric_limits<double>::infinity());
  for (int j = kk - window; j < kk; ++j)
    for (int i = 0; i < eigs.cols(); ++i) out(i) = std::min(out(i), eigs(j, i) / eigs(j - 1, i));
  return out;
}

struct TraceAnalysis {
  Slater slater = Slater::kUndecided;
  std::optional<SymMatrix> witness;
  std::string note;
};

TraceAnalysis analyze_slater(const Spectrahedron& f, const PathTrace& trace,
                             const FrOptions& opts) {
  TraceAnalysis out;
  if (trace.size() < opts.window + 2) {
    out.note = "path too short for a rate decision";
    return out;
  }
  const int n = f.order();
  const Vector px = tail_proxy(trace.eigs_x, opts.window);
  const double last = px(n - 1);
  if (last <= opts.sigma + opts.rate_band) {
    out.slater = Slater::kFails;
    return out;
  }
  if (last > opts.tau) {
    const PathLimits lim = dual_limit(trace);
    const SymMatrix w = f.map.project_affine(lim.X);
    const Vector lam = eigvals_desc(w);
    if (lam(n - 1) > opts.eps_rank * lam(0)) {
      out.slater = Slater::kHolds;
      out.witness = w;
      return out;
    }
    out.note = "smallest eigenvalue rate near one but limit is singular";
    return out;
  }
  out.note = "smallest eigenvalue rate is ambiguous";
  return out;
}

// Exposing vector for the problem the trace was computed on.
std::optional<ExposingVector> extract_exposing(const Spectrahedron& f, const PathTrace& trace,
                                               const FrOptions& opts, std::string* why) {
  const int n = f.order();
  if (trace.size() < std::max(opts.window + 2, opts.aitken_points)) {
    *why = "path too short";
    return std::nullopt;
  }
  const Vector pz = tail_proxy(trace.eigs_z, opts.window);
  const Vector px = tail_proxy(trace.eigs_x, opts.window);
  int q_rate = 0, q_x = 0;
  for (int i = 0; i < n; ++i) {
    if (pz(i) > opts.tau) ++q_rate;
    if (px(i) <= opts.sigma + opts.rate_band) ++q_x;
  }

  std::vector<Vector> ys;
  for (int j = trace.size() - opts.aitken_points; j < trace.size(); ++j)
    ys.push_back(trace.points[j].y);
  Vector y = aitken_limit(ys, opts.aitken_levels);
  const Vector& b = f.map.rhs();
  if (b.squaredNorm() > 0) y -= (y.dot(b) / b.squaredNorm()) * b;
  const SymMatrix z = f.map.adjoint(y);
  const Vector lam = eigvals_desc(z);
  if (!(lam(0) > 1e-9)) {
    *why = "extrapolated exposing matrix vanishes";
    return std::nullopt;
  }
  int q_mag = 0;
  for (int i = 0; i < n; ++i)
    if (lam(i) > opts.eps_rank * lam(0)) ++q_mag;
  if (lam(n - 1) < -1e-9 * std::max(1.0, lam(0))) {
    *why = "extrapolated exposing matrix is indefinite";
    return std::nullopt;
  }
  if (q_rate == 0 || q_rate != q_mag || q_rate != q_x) {
    *why = "rank disagreement: rate " + std::to_string(q_rate) + ", magnitude " +
           std::to_string(q_mag) + ", primal " + std::to_string(q_x);
    return std::nullopt;
  }
  return ExposingVector{y, z, q_mag};
}

Vector lift_multipliers(const Reduction& red, const Vector& y_red, int m) {
  Vector y = Vector::Zero(m);
  for (size_t i = 0; i < red.kept.size(); ++i) y(red.kept[i]) = y_red(i);
  return y;
}

void split_range(const SymMatrix& z, double rel_tol, int* q, Matrix* q1, Matrix* q2) {
  const EigenDecomposition e = eig_desc(z);
  const int r = z.order();
  int rank = 0;
  while (rank < r && e.values(rank) > rel_tol * e.values(0)) ++rank;
  *q = rank;
  *q1 = e.vectors.leftCols(rank);
  *q2 = e.vectors.rightCols(r - rank);
}

Reduction reduce_checked(const Spectrahedron& f, const Matrix& v, const FRResult& partial) {
  Reduction red = reduce(f.map, v);
  if (red.rhs_inconsistency > 1e-8 * std::max(1.0, f.map.rhs().norm()))
    throw FrError(Errc::kFRDiverged, "reduced constraints are inconsistent", partial);
  return red;
}

// Orthonormal basis for the range of the certified minimal face, if known.
std::optional<Matrix> certified_face_basis(const Spectrahedron& f) {
  if (!f.certificate) return std::nullopt;
  const Certificate& c = *f.certificate;
  if (c.solution_face) {
    if (c.solution_face->rank() == 0) return Matrix(f.order(), 0);
    Eigen::HouseholderQR<Matrix> qr(c.solution_face->V);
    return Matrix(qr.householderQ() * Matrix::Identity(f.order(), c.solution_face->rank()));
  }
  const std::optional<SymMatrix>& x = c.singleton_solution ? c.singleton_solution : c.relint_point;
  if (!x) return std::nullopt;
  int q;
  Matrix q1, q2;
  split_range(*x, 1e-9, &q, &q1, &q2);
  return q1;
}

bool same_span(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return false;
  if (a.cols() == 0) return true;
  const Matrix resid = b - a * (a.transpose() * b);
  return resid.norm() <= 1e-7 * std::sqrt(static_cast<double>(b.cols()));
}

FRResult reduce_numerical(const Spectrahedron& f, const FrOptions& opts) {
  const int n = f.order();
  const int m = f.map.constraints();
  FRResult res;
  res.mode = FrMode::kNumerical;
  res.V = Matrix::Identity(n, n);
  res.W = SymMatrix(n);
  for (int k = 1;; ++k) {
    res.d = static_cast<int>(res.steps.size());
    res.r = static_cast<int>(res.V.cols());
    const Reduction red = reduce_checked(f, res.V, res);
    if (red.map.constraints() == 0) return res;
    Spectrahedron fk;
    fk.map = red.map;
    const int r = res.r;
    PathTrace trace;
    try {
      trace = follow(fk, SymMatrix::identity(r), opts.sigma, opts.depth);
    } catch (const Error& e) {
      throw FrError(Errc::kFRDiverged, std::string("path failed: ") + e.what(), res);
    }
    const TraceAnalysis a = analyze_slater(fk, trace, opts);
    if (a.slater == Slater::kHolds) return res;
    if (a.slater == Slater::kUndecided)
      throw FrError(Errc::kFRDiverged, "step " + std::to_string(k) + ": " + a.note, res);
    if (k > std::max(1, n - 1))
      throw FrError(Errc::kFRDiverged, "iteration budget exhausted", res);

    std::string why;
    const std::optional<ExposingVector> ev = extract_exposing(fk, trace, opts, &why);
    if (!ev) throw FrError(Errc::kFRDiverged, "step " + std::to_string(k) + ": " + why, res);

    FRStep step;
    step.k = k;
    step.y = lift_multipliers(red, ev->y, m);
    step.Z = ev->Z;
    step.Vk = res.V;
    step.Wk = res.W;
    split_range(ev->Z, opts.eps_rank, &step.q, &step.Q1, &step.Q2);
    res.W = res.W + SymMatrix::symmetrize(res.V * ev->Z.dense() * res.V.transpose());
    res.V = res.V * step.Q2;
    res.steps.push_back(std::move(step));
    if (res.V.cols() == 0) {
      res.d = static_cast<int>(res.steps.size());
      res.r = 0;
      return res;
    }
  }
}

FRResult reduce_certified(const Spectrahedron& f, const FrOptions& opts) {
  if (!f.certificate || !f.certificate->exposing_chain)
    fail(Errc::kOracleUnavailable, "certified facial reduction needs an exposing chain");
  const int n = f.order();
  const int m = f.map.constraints();
  const std::vector<SymMatrix> samples = certified_samples(f);
  FRResult res;
  res.mode = FrMode::kCertified;
  res.V = Matrix::Identity(n, n);
  res.W = SymMatrix(n);
  int k = 0;
  for (const ExposingStep& s : *f.certificate->exposing_chain) {
    ++k;
    res.d = k - 1;
    res.r = static_cast<int>(res.V.cols());
    const std::string at = "certificate step " + std::to_string(k) + ": ";
    if (s.y.size() != m || s.Z.order() != n)
      throw FrError(Errc::kFRDiverged, at + "dimension mismatch", res);
    if (res.V.cols() == 0) throw FrError(Errc::kFRDiverged, at + "face already empty", res);
    const SymMatrix z =
        SymMatrix::symmetrize(res.V.transpose() * f.map.adjoint(s.y).dense() * res.V);
    const SymMatrix lifted = SymMatrix::symmetrize(res.V * z.dense() * res.V.transpose());
    if ((lifted - s.Z).norm() > 1e-8 * std::max(1.0, s.Z.norm()))
      throw FrError(Errc::kFRDiverged, at + "Z does not match the reduced adjoint", res);
    if (std::abs(s.y.dot(f.map.rhs())) > 1e-8 * std::max(1.0, s.y.norm() * f.map.rhs().norm()))
      throw FrError(Errc::kFRDiverged, at + "y is not orthogonal to b", res);
    const Vector lam = eigvals_desc(z);
    if (!(lam(0) > 0) || lam(lam.size() - 1) < -1e-9 * std::max(1.0, lam(0)))
      throw FrError(Errc::kFRDiverged, at + "Z is not a nonzero PSD matrix", res);
    if (!samples.empty() && !is_exposing(f, lifted, samples).exposing)
      throw FrError(Errc::kFRDiverged, at + "Z does not expose the feasible samples", res);

    FRStep step;
    step.k = k;
    step.y = s.y;
    step.Z = z;
    step.Vk = res.V;
    step.Wk = res.W;
    split_range(z, 1e-9, &step.q, &step.Q1, &step.Q2);
    res.W = res.W + lifted;
    res.V = res.V * step.Q2;
    res.steps.push_back(std::move(step));
  }
  res.d = static_cast<int>(res.steps.size());
  res.r = static_cast<int>(res.V.cols());
  if (res.d > std::max(1, n - 1))
    throw FrError(Errc::kFRDiverged, "chain longer than n - 1", res);
  if (res.r == 0) return res;

  if (const std::optional<Matrix> face = certified_face_basis(f)) {
    if (!same_span(res.V, *face))
      throw FrError(Errc::kFRDiverged, "chain does not reach the certified face", res);
    return res;
  }
  const Reduction red = reduce_checked(f, res.V, res);
  Spectrahedron fr;
  fr.map = red.map;
  try {
    if (!slater_check(fr, opts).holds)
      throw FrError(Errc::kFRDiverged, "final reduced problem is not strictly feasible", res);
  } catch (const FrError&) {
    throw;
  } catch (const Error& e) {
    throw FrError(Errc::kFRDiverged, std::string("final Slater test: ") + e.what(), res);
  }
  return res;
}

}  // namespace

const char* fr_mode_name(FrMode mode) {
  return mode == FrMode::kCertified ? "certified" : "numerical";
}

SlaterVerdict slater_check(const Spectrahedron& f, const FrOptions& opts) {
  if (f.map.constraints() == 0) return {true, SymMatrix::identity(f.order())};
  const PathTrace trace =
      follow(f, SymMatrix::identity(f.order()), opts.sigma, opts.slater_depth);
  const TraceAnalysis a = analyze_slater(f, trace, opts);
  if (a.slater == Slater::kUndecided) fail(Errc::kUndecided, a.note);
  return {a.slater == Slater::kHolds, a.witness};
}

ExposingVector exposing_vector(const Spectrahedron& f, const FrOptions& opts) {
  if (f.map.constraints() == 0)
    fail(Errc::kNoExposingVectorFound, "no constraints, the cone interior is feasible");
  const PathTrace trace = follow(f, SymMatrix::identity(f.order()), opts.sigma, opts.depth);
  const TraceAnalysis a = analyze_slater(f, trace, opts);
  if (a.slater == Slater::kHolds)
    fail(Errc::kNoExposingVectorFound, "Slater condition holds");
  if (a.slater == Slater::kUndecided) fail(Errc::kNoExposingVectorFound, "undecided: " + a.note);
  std::string why;
  const std::optional<ExposingVector> ev = extract_exposing(f, trace, opts, &why);
  if (!ev) fail(Errc::kNoExposingVectorFound, why);
  return *ev;
}

FRResult facial_reduction(const Spectrahedron& f, FrMode mode, const FrOptions& opts) {
  return mode == FrMode::kCertified ? reduce_certified(f, opts) : reduce_numerical(f, opts);
}

int singularity_degree(const Spectrahedron& f, FrMode mode, const FrOptions& opts) {
  FRResult res;
  try {
    res = facial_reduction(f, mode, opts);
  } catch (const FrError& e) {
    throw FrError(Errc::kSdUndecided, e.what(), e.partial());
  }
  return res.r == 0 ? 1 : res.d;
}

}  // namespace sdcheck
