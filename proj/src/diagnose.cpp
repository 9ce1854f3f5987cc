#include "sdcheck/diagnose.hpp"

#include <algorithm>
#include <cmath>

namespace sdcheck {

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0) fail(Errc::kInvalidSeries, "degenerate abscissae");
  return sxy / sxx;
}

}  // namespace

EigenSeries eigen_series(const PathTrace& trace) {
  EigenSeries s;
  s.sigma = trace.sigma;
  s.alphas.resize(trace.size());
  for (int j = 0; j < trace.size(); ++j) s.alphas(j) = trace.points[j].alpha;
  s.eigs = trace.eigs_x;
  s.near_floor = trace.size() > 0 && s.alphas(trace.size() - 1) <= 1e-11;
  return s;
}

RatioCurves ratios(const EigenSeries& series, int window) {
  const int kk = static_cast<int>(series.eigs.rows());
  const int n = static_cast<int>(series.eigs.cols());
  if (window < 2) fail(Errc::kInvalidSpec, "tail window must be at least 2");
  if (kk < window + 2) fail(Errc::kInsufficientTrace, "trace shorter than tail window + 2");
  if (!(series.eigs.array() > 0).all() || !series.eigs.allFinite())
    fail(Errc::kInvalidSeries, "eigenvalues must be positive and finite");
  RatioCurves c;
  c.sigma = series.sigma;
  c.window = window;
  c.rq.resize(n, kk - 1);
  for (int j = 0; j + 1 < kk; ++j)
    for (int i = 0; i < n; ++i) c.rq(i, j) = series.eigs(j + 1, i) / series.eigs(j, i);
  c.rn.resize(std::max(0, n - 1), kk);
  for (int j = 0; j < kk; ++j)
    for (int i = 0; i + 1 < n; ++i) c.rn(i, j) = series.eigs(j, i) / series.eigs(j, i + 1);
  c.tail_last = kk - 2;
  if (series.near_floor && kk - 1 >= window + 2) c.tail_last -= 2;
  c.tail_first = c.tail_last - window + 1;
  c.rq_above_band = (c.rq.middleCols(c.tail_first, window).array() > 1.05).any();
  return c;
}

RankBound max_rank_bound(const RatioCurves& curves, double tau) {
  if (!(tau > 0 && tau <= 0.95)) fail(Errc::kInvalidSpec, "tau must lie in (0, 0.95]");
  const int n = static_cast<int>(curves.rq.rows());
  RankBound out;
  out.liminf_proxy = curves.rq.middleCols(curves.tail_first, curves.window).rowwise().minCoeff();
  for (int r = 0; r <= n; ++r) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = (out.liminf_proxy(i) <= tau) == (i >= r);
    if (ok) {
      out.r_bar = r;
      out.clean = true;
      return out;
    }
  }
  int last_above = -1;
  for (int i = 0; i < n; ++i)
    if (out.liminf_proxy(i) > tau) last_above = i;
  out.r_bar = last_above + 1;
  out.clean = false;
  return out;
}

double ferror_lower_bound(const Vector& lam, int r_bar) {
  if (r_bar < 0 || r_bar > lam.size()) fail(Errc::kInvalidDimension, "r_bar out of range");
  return lam.tail(lam.size() - r_bar).norm();
}

double ferror_lower_bound(const SymMatrix& x, int r_bar) {
  return ferror_lower_bound(eigvals_desc(x), r_bar);
}

SdBound sd_lower_bound(const RatioCurves& curves, const Vector& proxy, int r_bar, double slack) {
  const int n = static_cast<int>(proxy.size());
  if (r_bar < 0 || r_bar > n) fail(Errc::kInvalidDimension, "r_bar out of range");
  SdBound out;
  const int fallback = std::max(1, n - 1);
  auto ladder = [&](int d) { return std::pow(curves.sigma, std::ldexp(1.0, -(d - 1))); };
  for (int d = 1; d <= fallback; ++d) out.ladder.push_back(ladder(d));
  if (r_bar == n) return out;
  // The search continues past n - 1 while the rungs stay distinguishable from 1.
  for (int d = 1; ladder(d) + slack < 1.0; ++d) {
    if (d > fallback) out.ladder.push_back(ladder(d));
    const double level = ladder(d) + slack;
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) ok = (proxy(i) <= level) == (i >= r_bar);
    if (ok) {
      out.d_lower = d;
      out.ladder.resize(std::max(fallback, d));
      return out;
    }
  }
  out.ladder.resize(fallback);
  out.d_lower = fallback;
  out.saturated = true;
  return out;
}

RateCount count_rates(const RatioCurves& curves, int r_bar) {
  const int n = static_cast<int>(curves.rq.rows());
  if (r_bar < 0 || r_bar > n) fail(Errc::kInvalidDimension, "r_bar out of range");
  RateCount out;
  const double cut = 0.05 * std::abs(std::log(curves.sigma));
  std::vector<double> ks;
  for (int j = curves.tail_first; j <= curves.tail_last + 1; ++j) ks.push_back(j);
  for (int i = r_bar; i + 1 < n; ++i) {
    std::vector<double> v;
    for (int j = curves.tail_first; j <= curves.tail_last + 1; ++j)
      v.push_back(std::log(curves.rn(i, j)));
    const double s = ls_slope(ks, v);
    out.slopes.push_back(s);
    if (s > cut) out.boundaries.push_back(i + 1);
  }
  out.n_lambda = 1 + static_cast<int>(out.boundaries.size());
  return out;
}

double sturm_exponent(const Vector& ef, const Vector& eb, int window) {
  if (ef.size() != eb.size()) fail(Errc::kInvalidSeries, "series lengths differ");
  if (window < 2 || ef.size() < window) fail(Errc::kInvalidSeries, "series shorter than window");
  const int first = static_cast<int>(ef.size()) - window;
  std::vector<double> x, y;
  for (int j = first; j < ef.size(); ++j) {
    if (!(ef(j) > 0 && eb(j) > 0) || !std::isfinite(ef(j)) || !std::isfinite(eb(j)))
      fail(Errc::kInvalidSeries, "errors must be positive and finite");
    x.push_back(std::log(eb(j)));
    y.push_back(std::log(ef(j)));
  }
  if (!(eb(ef.size() - 1) < eb(first))) fail(Errc::kInvalidSeries, "backward error is not decreasing");
  return ls_slope(x, y);
}

Report diagnose(const Spectrahedron& f, const PathTrace& trace, const DiagnoseOptions& opts) {
  const EigenSeries series = eigen_series(trace);
  const RatioCurves curves = ratios(series, opts.window);
  const RankBound rank = max_rank_bound(curves, opts.tau);
  const SdBound sd = sd_lower_bound(curves, rank.liminf_proxy, rank.r_bar);
  const RateCount rates = count_rates(curves, rank.r_bar);
  const int last = trace.size() - 1;

  Report rep;
  rep.tau = opts.tau;
  rep.r_bar = rank.r_bar;
  rep.liminf_proxy = rank.liminf_proxy;
  rep.berr_final = trace.berr(last);
  rep.eps_lower = ferror_lower_bound(Vector(trace.eigs_x.row(last).transpose()), rank.r_bar);
  rep.d_lower = sd.d_lower;
  rep.ladder = sd.ladder;
  rep.n_lambda = rates.n_lambda;
  if (f.certificate) {
    rep.r_true = f.certificate->max_rank_true;
    rep.sd_true = f.certificate->sd_true;
    if (f.certificate->singleton_solution || f.certificate->solution_face) {
      Vector ef(trace.size());
      for (int j = 0; j < trace.size(); ++j) ef(j) = forward_error(f, trace.points[j].X);
      rep.ef_oracle = ef(last);
      try {
        rep.sturm = sturm_exponent(ef, trace.berr, opts.window);
      } catch (const Error&) {
      }
    }
  }

  rep.verdicts.emplace_back("rank_split", rank.clean ? "clean" : "split-unclean");
  rep.verdicts.emplace_back("sd_lower", !sd.d_lower ? "undefined" : sd.saturated ? "saturated" : "ok");
  if (sd.d_lower)
    rep.verdicts.emplace_back("rate_count", rates.n_lambda >= *sd.d_lower
                                                ? "consistent"
                                                : "counterexample-candidate");
  rep.verdicts.emplace_back("trace", trace.truncated ? "truncated" : "complete");
  rep.verdicts.emplace_back("rq_band", curves.rq_above_band ? "rq-above-band" : "ok");
  return rep;
}

}  // namespace sdcheck
