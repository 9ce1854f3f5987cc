#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdcheck/errors.hpp"
#include "sdcheck/spectra.hpp"

namespace sdcheck {

struct PathPoint {
  double alpha = 0;
  SymMatrix X;
  Vector y;
  SymMatrix Z;
  double res_primal = 0;
  double res_dual = 0;
  double res_cent = 0;
  int iterations = 0;
};

struct CenterOptions {
  double tol_primal = 1e-12;  // relative to max(1, |b(alpha)|)
  double tol_dual = 1e-12;
  double tol_cent = 1e-8;     // relative to n * alpha
  double boundary_fraction = 0.98;
  int max_iterations = 200;
};

// Thrown by center(); carries the residuals of the last iterate.
class SolverError : public Error {
 public:
  SolverError(Errc code, const std::string& what, const PathPoint& last)
      : Error(code, what), last_(last) {}
  const PathPoint& last() const { return last_; }

 private:
  PathPoint last_;
};

// Warm start triple (X, y, Z).
struct WarmStart {
  SymMatrix X;
  Vector y;
  SymMatrix Z;
};

// Central point of F(alpha) = {X >= 0 : A(X) = b + alpha A(B)}.
PathPoint center(const Spectrahedron& f, const SymMatrix& b_dir, double alpha,
                 const std::optional<WarmStart>& warm = std::nullopt,
                 const CenterOptions& opts = {});

struct PathTrace {
  double sigma = 0.6;
  SymMatrix B;
  std::vector<PathPoint> points;  // points[j] has alpha = sigma^(j+1)
  Matrix eigs_x;                  // K x n, descending
  Matrix eigs_z;
  Vector berr;
  bool truncated = false;
  std::string truncation_reason;

  int size() const { return static_cast<int>(points.size()); }
};

// Largest k with sigma^k >= 1e-13.
int conditioning_kmax(double sigma);

PathTrace follow(const Spectrahedron& f, const SymMatrix& b_dir, double sigma, int k_max,
                 const CenterOptions& opts = {});

struct PathLimits {
  SymMatrix X;
  Vector y;
  SymMatrix Z;
};

// Fit v_k = v + c alpha_k over the last six points.
PathLimits dual_limit(const PathTrace& trace);

// Repeated Aitken delta-squared extrapolation, componentwise, over a sequence
// that converges geometrically. Components whose successive differences do
// not contract keep their last value.
Vector aitken_limit(const std::vector<Vector>& seq, int levels);

}  // namespace sdcheck
