#include "sdcheck/bench.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "sdcheck/facialred.hpp"

namespace sdcheck {

namespace {

constexpr int kGenRetries = 10;

Matrix gaussian(Rng& rng, int rows, int cols) {
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return g;
}

Matrix random_orthogonal(Rng& rng, int n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

SymMatrix random_symmetric(Rng& rng, int n) {
  const Matrix g = gaussian(rng, n, n);
  return SymMatrix::symmetrize(g);
}

// Q diag(d) Q^T with d uniform in [lo, hi].
SymMatrix random_spd(Rng& rng, int n, double lo, double hi) {
  const Matrix q = random_orthogonal(rng, n);
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = lo + (hi - lo) * rng.uniform();
  return SymMatrix::symmetrize(q * d.asDiagonal() * q.transpose());
}

Matrix block_diag(const std::vector<Matrix>& blocks) {
  int rows = 0, cols = 0;
  for (const Matrix& b : blocks) {
    rows += static_cast<int>(b.rows());
    cols += static_cast<int>(b.cols());
  }
  Matrix out = Matrix::Zero(rows, cols);
  int r0 = 0, c0 = 0;
  for (const Matrix& b : blocks) {
    out.block(r0, c0, b.rows(), b.cols()) = b;
    r0 += static_cast<int>(b.rows());
    c0 += static_cast<int>(b.cols());
  }
  return out;
}

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Spectrahedron gen_worst_case(int n) {
  if (n < 2) fail(Errc::kInvalidSpec, "worst case needs n >= 2");
  std::vector<SymMatrix> mats;
  Vector b = Vector::Zero(n);
  Matrix a = Matrix::Zero(n, n);
  a(0, 0) = 1;
  mats.emplace_back(a);
  b(0) = 1;
  a.setZero();
  a(1, 1) = 1;
  mats.emplace_back(a);
  for (int t = 2; t < n; ++t) {
    a.setZero();
    a(t, t) = 1;
    a(0, t - 1) = a(t - 1, 0) = -0.5;
    mats.emplace_back(a);
  }

  Spectrahedron f;
  f.name = "worst_case_n" + std::to_string(n);
  f.map = LinearMap(n, std::move(mats), b);
  Certificate c;
  Matrix x = Matrix::Zero(n, n);
  x(0, 0) = 1;
  c.singleton_solution = SymMatrix(x);
  c.relint_point = SymMatrix(x);
  c.max_rank_true = 1;
  c.sd_true = n - 1;
  Vector w = Vector::Ones(n);
  w(0) = 0;
  c.solution_face = FaceRep{Matrix::Identity(n, 1), SymMatrix::diagonal(w)};
  std::vector<ExposingStep> chain;
  for (int k = 1; k < n; ++k) {
    Vector y = Vector::Zero(n);
    y(k) = 1;
    Matrix z = Matrix::Zero(n, n);
    z(k, k) = 1;
    chain.push_back({y, SymMatrix(z)});
  }
  c.exposing_chain = std::move(chain);
  f.certificate = std::move(c);
  return f;
}

Spectrahedron gen_slater(int n, int m, std::uint64_t seed) {
  if (n < 1 || m < 1 || m > svec_length(n)) fail(Errc::kInvalidSpec, "need n >= 1 and 1 <= m <= n(n+1)/2");
  Rng rng(seed);
  for (int attempt = 0; attempt < kGenRetries; ++attempt) {
    std::vector<SymMatrix> mats;
    mats.push_back(random_spd(rng, n, 0.5, 2.0));
    for (int i = 1; i < m; ++i) mats.push_back(random_symmetric(rng, n));
    const SymMatrix x0 = random_spd(rng, n, 0.5, 2.0);
    Vector b(m);
    for (int i = 0; i < m; ++i) b(i) = inner(mats[i], x0);
    LinearMap map(n, std::move(mats), b);
    if (!map.surjective()) continue;

    Spectrahedron f;
    f.name = "slater_n" + std::to_string(n) + "_m" + std::to_string(m) + "_s" + std::to_string(seed);
    f.map = std::move(map);
    Certificate c;
    c.sd_true = 0;
    c.max_rank_true = n;
    c.solution_face = FaceRep{Matrix::Identity(n, n), SymMatrix(n)};
    c.relint_point = x0;
    c.exposing_chain = std::vector<ExposingStep>{};
    f.certificate = std::move(c);
    return f;
  }
  fail(Errc::kGenFailed, "no surjective draw after retries");
}

Spectrahedron gen_rank_r_sd1(int n, int r, std::uint64_t seed) {
  if (n < 2 || r < 1 || r >= n) fail(Errc::kInvalidSpec, "need 1 <= r < n");
  Rng rng(seed);
  const int extra = std::max(1, (r * (r + 1) + 3) / 4);
  for (int attempt = 0; attempt < kGenRetries; ++attempt) {
    const Matrix q = random_orthogonal(rng, n);
    const Matrix v = q.leftCols(r);
    const Matrix u = q.rightCols(n - r);
    Vector wd(n - r);
    for (int i = 0; i < n - r; ++i) wd(i) = 0.5 + 1.5 * rng.uniform();
    const SymMatrix w = SymMatrix::symmetrize(u * wd.asDiagonal() * u.transpose());
    const SymMatrix rbar = random_spd(rng, r, 0.5, 2.0);
    const SymMatrix xbar = SymMatrix::symmetrize(v * rbar.dense() * v.transpose());

    std::vector<SymMatrix> mats{w, random_spd(rng, n, 0.5, 2.0)};
    for (int i = 1; i < extra; ++i) mats.push_back(random_symmetric(rng, n));
    const int m = static_cast<int>(mats.size());
    Vector b(m);
    for (int i = 0; i < m; ++i) b(i) = inner(mats[i], xbar);
    b(0) = 0.0;
    LinearMap map(n, std::move(mats), b);
    if (!map.surjective()) continue;

    Spectrahedron f;
    f.name = "rank_r_sd1_n" + std::to_string(n) + "_r" + std::to_string(r) + "_s" +
             std::to_string(seed);
    f.map = std::move(map);
    Certificate c;
    c.sd_true = 1;
    c.max_rank_true = r;
    c.solution_face = FaceRep{v, w};
    c.relint_point = xbar;
    Vector y = Vector::Zero(m);
    y(0) = 1;
    c.exposing_chain = std::vector<ExposingStep>{{y, w}};
    f.certificate = std::move(c);
    return f;
  }
  fail(Errc::kGenFailed, "no surjective draw after retries");
}

Spectrahedron gen_direct_sum(const std::vector<Spectrahedron>& children) {
  if (children.empty()) fail(Errc::kInvalidSpec, "direct sum of nothing");
  int n = 0, m = 0, rank = 0;
  size_t chain_len = 0;
  std::vector<Matrix> vs, ws, xs;
  std::string name = "sum";
  for (const Spectrahedron& ch : children) {
    if (!ch.certificate || !ch.certificate->max_rank_true || !ch.certificate->exposing_chain ||
        !ch.certificate->relint_point || !ch.certificate->solution_face)
      fail(Errc::kInvalidSpec, "direct sum child '" + ch.name + "' is not fully certified");
    const Certificate& c = *ch.certificate;
    n += ch.order();
    m += ch.map.constraints();
    rank += *c.max_rank_true;
    chain_len = std::max(chain_len, c.exposing_chain->size());
    vs.push_back(c.solution_face->V);
    ws.push_back(c.solution_face->W.dense());
    xs.push_back(c.relint_point->dense());
    name += "_" + ch.name;
  }

  std::vector<SymMatrix> mats;
  Vector b(m);
  int r0 = 0, c0 = 0;
  for (const Spectrahedron& ch : children) {
    for (int i = 0; i < ch.map.constraints(); ++i) {
      Matrix a = Matrix::Zero(n, n);
      a.block(r0, r0, ch.order(), ch.order()) = ch.map.mats()[i].dense();
      mats.emplace_back(a);
      b(c0 + i) = ch.map.rhs()(i);
    }
    r0 += ch.order();
    c0 += ch.map.constraints();
  }

  std::vector<ExposingStep> chain;
  for (size_t k = 0; k < chain_len; ++k) {
    Vector y(m);
    std::vector<Matrix> zs;
    int off = 0;
    for (const Spectrahedron& ch : children) {
      const auto& cc = *ch.certificate->exposing_chain;
      const int mc = ch.map.constraints();
      if (k < cc.size()) {
        y.segment(off, mc) = cc[k].y;
        zs.push_back(cc[k].Z.dense());
      } else {
        y.segment(off, mc).setZero();
        zs.push_back(Matrix::Zero(ch.order(), ch.order()));
      }
      off += mc;
    }
    chain.push_back({y, SymMatrix(block_diag(zs))});
  }

  Spectrahedron f;
  f.name = name;
  f.map = LinearMap(n, std::move(mats), b);
  Certificate c;
  c.max_rank_true = rank;
  c.solution_face = FaceRep{block_diag(vs), SymMatrix(block_diag(ws))};
  c.relint_point = SymMatrix(block_diag(xs));
  c.exposing_chain = std::move(chain);
  f.certificate = c;
  f.certificate->sd_true = singularity_degree(f, FrMode::kCertified);
  return f;
}

EigenSeries cexample_trace(const Vector& alphas, double sigma) {
  EigenSeries s;
  s.sigma = sigma;
  s.alphas = alphas;
  s.eigs.resize(alphas.size(), 3);
  for (Eigen::Index j = 0; j < alphas.size(); ++j) {
    const double a = alphas(j);
    if (!(a > 0) || a >= std::sqrt(3.0)) fail(Errc::kOutOfDomain, "alpha must lie in (0, sqrt(3))");
    const double c = a / (3.0 - a * a);
    const double det = a * a * a / (3.0 - a * a);
    const double tr = 3.0 + c;
    const double big = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    Vector lam(3);
    lam << big, det / big, a * a * a;
    std::sort(lam.data(), lam.data() + 3, std::greater<double>());
    s.eigs.row(j) = lam.transpose();
  }
  return s;
}

}  // namespace sdcheck
