#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sdcheck/diagnose.hpp"
#include "sdcheck/spectra.hpp"

namespace sdcheck {

// X11 = 1, X22 = 0, X_{j+1,j+1} = X_{1j} for j = 2..n-1. Feasible set {e1 e1^T}.
Spectrahedron gen_worst_case(int n);

// Random surjective map with b = A(X0), X0 > 0. The first constraint matrix is
// positive definite so the feasible set is bounded.
Spectrahedron gen_slater(int n, int m, std::uint64_t seed);

// Feasible set inside the face V S_+^r V^T, exposed by one constraint <W, X> = 0.
Spectrahedron gen_rank_r_sd1(int n, int r, std::uint64_t seed);

// Block-diagonal sum of certified instances.
Spectrahedron gen_direct_sum(const std::vector<Spectrahedron>& children);

// Eigenvalues of [[3, sqrt(a), 0], [sqrt(a), a / (3 - a^2), 0], [0, 0, a^3]].
EigenSeries cexample_trace(const Vector& alphas, double sigma = 0.6);

// mt19937_64 bits mapped to doubles by hand, since the standard distributions
// are not reproducible across library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdcheck
