#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sdcheck/pathfollow.hpp"

namespace sdcheck {

// Eigenvalues of X along alpha_k = sigma^k, one row per k, descending.
struct EigenSeries {
  double sigma = 0.6;
  Vector alphas;
  Matrix eigs;
  bool near_floor = false;  // last alpha within 100x of the 1e-13 floor
};

EigenSeries eigen_series(const PathTrace& trace);

struct RatioCurves {
  double sigma = 0.6;
  int window = 10;
  // rq(i, j) = lambda_i(k_{j+1}) / lambda_i(k_j), j = 0..K-2.
  Matrix rq;
  // rn(i, j) = lambda_i(k_j) / lambda_{i+1}(k_j), i = 0..n-2.
  Matrix rn;
  int tail_first = 0;  // first rq column of the liminf window
  int tail_last = 0;   // last rq column of the liminf window (inclusive)
  bool rq_above_band = false;
};

RatioCurves ratios(const EigenSeries& series, int window = 10);

struct RankBound {
  int r_bar = 0;
  Vector liminf_proxy;
  bool clean = true;
};

RankBound max_rank_bound(const RatioCurves& curves, double tau = 0.9);

double ferror_lower_bound(const SymMatrix& x, int r_bar);
double ferror_lower_bound(const Vector& eig_desc_values, int r_bar);

struct SdBound {
  std::optional<int> d_lower;  // empty when r_bar == n
  std::vector<double> ladder;  // sigma^(2^-(d-1)), d = 1..max(n-1, d_lower)
  bool saturated = false;
};

// Slack added to each ladder value before comparing with the proxy.
constexpr double kLadderSlack = 0.005;

SdBound sd_lower_bound(const RatioCurves& curves, const Vector& liminf_proxy, int r_bar,
                       double slack = kLadderSlack);

struct RateCount {
  int n_lambda = 1;
  std::vector<double> slopes;  // slope of log RN(i, k) vs k, i = r_bar+1..n-1
  std::vector<int> boundaries;
};

RateCount count_rates(const RatioCurves& curves, int r_bar);

// Least-squares slope of log ef vs log eb over the last `window` entries.
double sturm_exponent(const Vector& ef, const Vector& eb, int window = 10);

struct DiagnoseOptions {
  double tau = 0.9;
  int window = 10;
};

struct Report {
  std::optional<int> r_true;
  int r_bar = 0;
  double berr_final = 0;
  std::optional<double> ef_oracle;
  double eps_lower = 0;
  std::optional<int> sd_true;
  std::optional<int> d_lower;
  int n_lambda = 1;
  double tau = 0.9;
  std::vector<double> ladder;
  Vector liminf_proxy;
  std::optional<double> sturm;
  std::vector<std::pair<std::string, std::string>> verdicts;
};

Report diagnose(const Spectrahedron& f, const PathTrace& trace, const DiagnoseOptions& opts = {});

}  // namespace sdcheck
