#include "sdcheck/pathfollow.hpp"

#include <algorithm>
#include <cmath>

namespace sdcheck {

namespace {

const double kSqrt2Inv = 1.0 / std::sqrt(2.0);

struct Residual {
  Vector stacked;
  double primal = 0;
  double dual = 0;
  double cent = 0;
};

Residual residual(const LinearMap& map, const Vector& b_alpha, double alpha, const SymMatrix& x,
                  const Vector& y, const SymMatrix& z) {
  const int n = map.order();
  const int nn = svec_length(n);
  const int m = map.constraints();
  Residual r;
  r.stacked.resize(nn + m + n * n);
  const Vector rd = svec(map.adjoint(y)) - svec(z);
  const Vector rp = map.apply(x) - b_alpha;
  Matrix rc = z.dense() * x.dense();
  rc.diagonal().array() -= alpha;
  r.stacked.segment(0, nn) = rd;
  r.stacked.segment(nn, m) = rp;
  r.stacked.segment(nn + m, n * n) = Eigen::Map<const Vector>(rc.data(), n * n);
  r.dual = rd.norm();
  r.primal = rp.norm();
  r.cent = rc.norm();
  return r;
}

// Jacobian of the stacked residual with respect to (svec X, y, svec Z).
Matrix jacobian(const LinearMap& map, const SymMatrix& x, const SymMatrix& z) {
  const int n = map.order();
  const int nn = svec_length(n);
  const int m = map.constraints();
  const Matrix& xd = x.dense();
  const Matrix& zd = z.dense();
  Matrix j = Matrix::Zero(nn + m + n * n, 2 * nn + m);
  const Matrix& msv = map.svec_matrix();
  j.block(0, nn, nn, m) = msv.transpose();
  j.block(0, nn + m, nn, nn) = -Matrix::Identity(nn, nn);
  j.block(nn, 0, m, nn) = msv;
  const int c0 = nn + m;
  int t = 0;
  for (int q = 0; q < n; ++q) {
    for (int p = q; p < n; ++p, ++t) {
      // Row index of (i, k) in vec(ZX) is c0 + i + k n.
      if (p == q) {
        for (int i = 0; i < n; ++i) j(c0 + i + p * n, t) = zd(i, p);
        for (int k = 0; k < n; ++k) j(c0 + p + k * n, nn + m + t) = xd(p, k);
      } else {
        for (int i = 0; i < n; ++i) {
          j(c0 + i + q * n, t) += kSqrt2Inv * zd(i, p);
          j(c0 + i + p * n, t) += kSqrt2Inv * zd(i, q);
        }
        for (int k = 0; k < n; ++k) {
          j(c0 + p + k * n, nn + m + t) += kSqrt2Inv * xd(q, k);
          j(c0 + q + k * n, nn + m + t) += kSqrt2Inv * xd(p, k);
        }
      }
    }
  }
  return j;
}

// Largest step in (0, 1] keeping M + t D inside frac of the way to the boundary.
double step_to_boundary(const SymMatrix& m, const SymMatrix& d, double frac) {
  Eigen::LLT<Matrix> llt(m.dense());
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix linv_d = llt.matrixL().solve(d.dense());
  const Matrix s = llt.matrixL().solve(linv_d.transpose());
  const Vector lam = eigvals_desc(SymMatrix::symmetrize(s));
  const double lmin = lam(lam.size() - 1);
  if (lmin >= 0) return 1.0;
  return std::min(1.0, frac / -lmin);
}

bool positive_definite(const SymMatrix& m) {
  Eigen::LLT<Matrix> llt(m.dense());
  return llt.info() == Eigen::Success;
}

}  // namespace

PathPoint center(const Spectrahedron& f, const SymMatrix& b_dir, double alpha,
                 const std::optional<WarmStart>& warm, const CenterOptions& opts) {
  const LinearMap& map = f.map;
  const int n = map.order();
  const int nn = svec_length(n);
  const int m = map.constraints();
  if (b_dir.order() != n) fail(Errc::kInvalidDimension, "perturbation direction order mismatch");
  if (!(alpha > 0)) fail(Errc::kInvalidSpec, "alpha must be positive");
  const Vector b_alpha = map.rhs() + alpha * map.apply(b_dir);

  PathPoint pt;
  pt.alpha = alpha;
  if (warm) {
    pt.X = warm->X;
    pt.y = warm->y;
    pt.Z = warm->Z;
  } else {
    const double tau = std::max(1.0, b_alpha.norm());
    pt.X = SymMatrix::identity(n) * tau;
    pt.y = Vector::Zero(m);
    pt.Z = SymMatrix::identity(n) * (alpha / tau);
  }

  const double tol_p = opts.tol_primal * std::max(1.0, b_alpha.norm());
  const double tol_c = opts.tol_cent * n * alpha;
  Residual r = residual(map, b_alpha, alpha, pt.X, pt.y, pt.Z);
  auto record = [&]() {
    pt.res_primal = r.primal;
    pt.res_dual = r.dual;
    pt.res_cent = r.cent;
  };
  record();

  for (int it = 0;; ++it) {
    if (r.primal <= tol_p && r.dual <= opts.tol_dual && r.cent <= tol_c) {
      pt.iterations = it;
      return pt;
    }
    if (it >= opts.max_iterations)
      throw SolverError(Errc::kMaxIterations, "centering did not converge", pt);

    const Matrix j = jacobian(map, pt.X, pt.Z);
    const Vector step = j.colPivHouseholderQr().solve(-r.stacked);
    const SymMatrix dx = smat(step.segment(0, nn), n);
    const Vector dy = step.segment(nn, m);
    const SymMatrix dz = smat(step.segment(nn + m, nn), n);

    double t = std::min(step_to_boundary(pt.X, dx, opts.boundary_fraction),
                        step_to_boundary(pt.Z, dz, opts.boundary_fraction));
    const double merit = r.stacked.norm();
    bool accepted = false;
    while (t > 1e-14) {
      const SymMatrix xt = pt.X + dx * t;
      const SymMatrix zt = pt.Z + dz * t;
      if (positive_definite(xt) && positive_definite(zt)) {
        const Vector yt = pt.y + t * dy;
        Residual rt = residual(map, b_alpha, alpha, xt, yt, zt);
        if (rt.stacked.norm() <= (1.0 - 1e-4 * t) * merit) {
          pt.X = xt;
          pt.y = yt;
          pt.Z = zt;
          r = std::move(rt);
          record();
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) {
      pt.iterations = it;
      throw SolverError(Errc::kLineSearchStall, "no decrease along the Gauss-Newton direction", pt);
    }
  }
}

int conditioning_kmax(double sigma) {
  return static_cast<int>(std::floor(std::log(1e-13) / std::log(sigma) + 1e-9));
}

PathTrace follow(const Spectrahedron& f, const SymMatrix& b_dir, double sigma, int k_max,
                 const CenterOptions& opts) {
  if (!(sigma > 0 && sigma < 1)) fail(Errc::kInvalidSpec, "sigma must lie in (0, 1)");
  if (k_max < 1) fail(Errc::kInvalidSpec, "k_max must be positive");
  if (f.map.constraints() > 0 && !f.map.surjective())
    fail(Errc::kInvalidSpec, "constraint map is not surjective");
  {
    const Vector lam = eigvals_desc(b_dir);
    if (lam.size() != f.order() || lam(lam.size() - 1) <= 0)
      fail(Errc::kInvalidSpec, "perturbation direction must be positive definite");
  }
  k_max = std::min(k_max, conditioning_kmax(sigma));

  PathTrace trace;
  trace.sigma = sigma;
  trace.B = b_dir;
  std::optional<WarmStart> warm;
  double alpha = 1.0;
  for (int k = 1; k <= k_max; ++k) {
    alpha *= sigma;
    try {
      PathPoint p = center(f, b_dir, alpha, warm, opts);
      warm = WarmStart{p.X, p.y, p.Z};
      trace.points.push_back(std::move(p));
    } catch (const SolverError& e) {
      trace.truncated = true;
      trace.truncation_reason = "k=" + std::to_string(k) + ": " + e.what();
      break;
    }
  }

  const int kk = trace.size();
  const int n = f.order();
  trace.eigs_x.resize(kk, n);
  trace.eigs_z.resize(kk, n);
  trace.berr.resize(kk);
  for (int j = 0; j < kk; ++j) {
    trace.eigs_x.row(j) = eigvals_desc(trace.points[j].X).transpose();
    trace.eigs_z.row(j) = eigvals_desc(trace.points[j].Z).transpose();
    trace.berr(j) = backward_error(f, trace.points[j].X);
  }
  return trace;
}

PathLimits dual_limit(const PathTrace& trace) {
  constexpr int kPoints = 6;
  if (trace.size() < kPoints) fail(Errc::kInsufficientTrace, "dual_limit needs six points");
  const int first = trace.size() - kPoints;
  Matrix design(kPoints, 2);
  for (int j = 0; j < kPoints; ++j) {
    design(j, 0) = 1.0;
    design(j, 1) = trace.points[first + j].alpha;
  }
  const auto qr = design.colPivHouseholderQr();
  auto fit = [&](auto get) {
    const Vector v0 = get(trace.points[first]);
    Matrix data(kPoints, v0.size());
    for (int j = 0; j < kPoints; ++j) data.row(j) = get(trace.points[first + j]).transpose();
    const Matrix coef = qr.solve(data);
    return Vector(coef.row(0).transpose());
  };
  const int n = trace.points[first].X.order();
  PathLimits out;
  out.X = smat(fit([](const PathPoint& p) { return svec(p.X); }), n);
  out.y = fit([](const PathPoint& p) { return p.y; });
  out.Z = proj_psd(smat(fit([](const PathPoint& p) { return svec(p.Z); }), n));
  return out;
}

Vector aitken_limit(const std::vector<Vector>& seq, int levels) {
  if (seq.empty()) fail(Errc::kInsufficientTrace, "empty sequence");
  std::vector<Vector> cur = seq;
  for (int level = 0; level < levels && cur.size() >= 3; ++level) {
    std::vector<Vector> next;
    for (size_t i = 0; i + 2 < cur.size(); ++i) {
      Vector v = cur[i + 2];
      for (Eigen::Index c = 0; c < v.size(); ++c) {
        const double d1 = cur[i + 1](c) - cur[i](c);
        const double d2 = cur[i + 2](c) - cur[i + 1](c);
        if (d1 == 0.0) continue;
        const double rho = d2 / d1;
        if (rho > 0.0 && rho < 1.0) v(c) += d2 * rho / (1.0 - rho);
      }
      next.push_back(std::move(v));
    }
    cur = std::move(next);
  }
  return cur.back();
}

}  // namespace sdcheck
