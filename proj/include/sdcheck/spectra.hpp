#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sdcheck/symcore.hpp"

namespace sdcheck {

// X -> (<A_1, X>, ..., <A_m, X>) with right-hand side b.
class LinearMap {
 public:
  LinearMap() = default;
  LinearMap(int n, std::vector<SymMatrix> mats, Vector b);

  int order() const { return n_; }
  int constraints() const { return static_cast<int>(mats_.size()); }
  const std::vector<SymMatrix>& mats() const { return mats_; }
  const Vector& rhs() const { return b_; }
  // m x svec_length(n); row i is svec(A_i).
  const Matrix& svec_matrix() const { return M_; }
  // Singular values of svec_matrix() all above 1e-9 times the largest.
  bool surjective() const { return surjective_; }

  Vector apply(const SymMatrix& x) const;
  SymMatrix adjoint(const Vector& y) const;

  // Minimum-norm D with A(X + D) = b, in svec coordinates, for residual
  // r = b - A(X). Throws InfeasibleAffine if r is not in the range.
  Vector min_norm_correction(const Vector& r) const;
  // Project X onto {A(X) = b}.
  SymMatrix project_affine(const SymMatrix& x) const;

 private:
  int n_ = 0;
  std::vector<SymMatrix> mats_;
  Vector b_;
  Matrix M_;
  bool surjective_ = true;
  std::shared_ptr<const Eigen::CompleteOrthogonalDecomposition<Matrix>> cod_;
};

// face(F) = V S_+^r V^T with exposing W: W V = 0 and W + V V^T > 0.
struct FaceRep {
  Matrix V;
  SymMatrix W;

  int order() const { return static_cast<int>(V.rows()); }
  int rank() const { return static_cast<int>(V.cols()); }
  // Throws InvalidSpec when the defining relations fail.
  void validate() const;
};

// One facial reduction step in ambient coordinates: y indexes the original
// constraints and Z is the lift V_k Z_k V_k^T of the reduced exposing matrix.
struct ExposingStep {
  Vector y;
  SymMatrix Z;
};

struct Certificate {
  std::optional<int> sd_true;
  std::optional<int> max_rank_true;
  std::optional<FaceRep> solution_face;
  std::optional<SymMatrix> singleton_solution;
  std::optional<std::vector<ExposingStep>> exposing_chain;
  // A feasible point of maximum rank, when the generator knows one.
  std::optional<SymMatrix> relint_point;
};

struct Spectrahedron {
  LinearMap map;
  std::optional<Certificate> certificate;
  std::string name;

  int order() const { return map.order(); }
};

// Append <C, X> = p_star as an extra constraint.
Spectrahedron fold_objective(const Spectrahedron& f, const SymMatrix& c, double p_star);

double backward_error(const Spectrahedron& f, const SymMatrix& x);
double forward_error(const Spectrahedron& f, const SymMatrix& x);

struct Reduction {
  LinearMap map;                 // constraints V^T A_i V for kept rows
  std::vector<int> kept;         // indices into the original constraints
  std::vector<int> dropped;
  Matrix dropped_combination;    // dropped rows = combination * kept rows
  double rhs_inconsistency = 0;  // |b_dropped - combination * b_kept|
};

Reduction reduce(const LinearMap& map, const Matrix& v);

struct ExposureCheck {
  bool exposing = false;
  bool trivial = false;  // W == 0
};

ExposureCheck is_exposing(const Spectrahedron& f, const SymMatrix& w,
                          const std::vector<SymMatrix>& samples);

// Feasible samples implied by the certificate (singleton or relative interior point).
std::vector<SymMatrix> certified_samples(const Spectrahedron& f);

}  // namespace sdcheck
