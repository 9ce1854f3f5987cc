#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdcheck/pathfollow.hpp"

namespace sdcheck {

enum class FrMode { kCertified, kNumerical };

const char* fr_mode_name(FrMode mode);

struct FRStep {
  int k = 0;
  Vector y;      // multipliers on the original constraints
  SymMatrix Z;   // reduced exposing matrix, order r_k
  int q = 0;     // rank of Z
  Matrix Q1;     // range of Z
  Matrix Q2;     // null space of Z
  Matrix Vk;     // face basis before this step (n x r_k)
  SymMatrix Wk;  // accumulated exposing matrix before this step
};

struct FRResult {
  int d = 0;
  std::vector<FRStep> steps;
  Matrix V;
  SymMatrix W;
  int r = 0;
  FrMode mode = FrMode::kNumerical;
};

struct FrOptions {
  double sigma = 0.6;
  int depth = 40;         // path depth used for the exposing vector
  int slater_depth = 25;  // path depth used by the standalone Slater test
  double tau = 0.9;
  int window = 10;
  double eps_rank = 1e-7;
  double rate_band = 0.05;
  int aitken_points = 7;
  int aitken_levels = 2;
};

// Carries the partial result when facial reduction cannot finish.
class FrError : public Error {
 public:
  FrError(Errc code, const std::string& what, FRResult partial)
      : Error(code, what), partial_(std::move(partial)) {}
  const FRResult& partial() const { return partial_; }

 private:
  FRResult partial_;
};

struct SlaterVerdict {
  bool holds = false;
  std::optional<SymMatrix> witness;  // positive definite feasible point
};

// Throws Undecided when the eigenvalue rates are inconclusive.
SlaterVerdict slater_check(const Spectrahedron& f, const FrOptions& opts = {});

struct ExposingVector {
  Vector y;
  SymMatrix Z;
  int q = 0;
};

ExposingVector exposing_vector(const Spectrahedron& f, const FrOptions& opts = {});

FRResult facial_reduction(const Spectrahedron& f, FrMode mode, const FrOptions& opts = {});

int singularity_degree(const Spectrahedron& f, FrMode mode, const FrOptions& opts = {});

}  // namespace sdcheck
