// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sdcheck/bench.hpp"
#include "sdcheck/diagnose.hpp"
#include "sdcheck/facialred.hpp"

using namespace sdcheck;

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s C%d %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

void info(const std::string& detail) {
  std::printf("INFO %s\n", detail.c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : "null"; }

// Rerun the diagnosis with any callable, converting library errors to a failed line.
template <typename F>
void guarded(int id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    verdict(id, false, std::string("error: ") + e.what());
  }
}

void criterion1() {
  guarded(1, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Spectrahedron f = gen_worst_case(5);
    const int certified = singularity_degree(f, FrMode::kCertified);
    std::string numerical;
    bool numerical_ok = false;
    try {
      const int d = singularity_degree(f, FrMode::kNumerical);
      numerical = std::to_string(d);
      numerical_ok = d == 4;
    } catch (const FrError& e) {
      numerical = "SdUndecided";
      numerical_ok = e.code() == Errc::kSdUndecided;
    }
    const double secs = seconds_since(t0);
    verdict(1, certified == 4 && numerical_ok && secs < 10,
            "worst-case n=5 facial reduction: certified d=" + std::to_string(certified) +
                " (want 4), numerical=" + numerical + " (want 4 or SdUndecided), " +
                fmt("%.2f", secs) + " s (limit 10)");
  });
}

struct WorstRun {
  Spectrahedron f;
  PathTrace trace;
  Report report;
  double secs = 0;
};

WorstRun run_worst_case_five() {
  WorstRun w;
  const auto t0 = std::chrono::steady_clock::now();
  w.f = gen_worst_case(5);
  w.trace = follow(w.f, SymMatrix::identity(5), 0.6, 60);
  DiagnoseOptions opts;
  opts.tau = 0.9;
  opts.window = 10;
  w.report = diagnose(w.f, w.trace, opts);
  w.secs = seconds_since(t0);
  return w;
}

void criteria2and3() {
  WorstRun w;
  try {
    w = run_worst_case_five();
  } catch (const std::exception& e) {
    verdict(2, false, std::string("error: ") + e.what());
    verdict(3, false, std::string("error: ") + e.what());
    return;
  }
  const Report& r = w.report;
  verdict(2, r.r_bar == 1 && r.d_lower == 4 && r.n_lambda == 4 && w.secs < 120,
          "worst-case n=5 run (sigma=0.6, k_max=60 -> " + std::to_string(w.trace.size()) +
              " points, tau=0.9): r_bar=" + std::to_string(r.r_bar) + " (want 1), d_lower=" +
              opt_int(r.d_lower) + " (want 4), N_lambda=" + std::to_string(r.n_lambda) +
              " (want 4), " + fmt("%.2f", w.secs) + " s (limit 120)");

  const double ef = r.ef_oracle.value_or(NAN);
  const bool berr_ok = r.berr_final <= 1e-11;
  const bool ef_ok = ef >= 1e-2;
  const bool lower_ok = r.eps_lower >= 1e-2 && r.eps_lower <= 1e-1;
  const bool ef_match = ef >= 4.93e-2 / 3 && ef <= 4.93e-2 * 3;
  const bool lower_match = r.eps_lower >= 3.19e-2 / 3 && r.eps_lower <= 3.19e-2 * 3;
  verdict(3, berr_ok && ef_ok && lower_ok && ef_match && lower_match,
          "same run: berr=" + fmt("%.3e", r.berr_final) + " (<=1e-11), ef=" + fmt("%.3e", ef) +
              " (>=1e-2, within x3 of 4.93e-2), eps_lower=" + fmt("%.3e", r.eps_lower) +
              " (in [1e-2,1e-1], within x3 of 3.19e-2)");

  // Not a criterion: the same trace diagnosed at the largest admissible tau.
  DiagnoseOptions wide;
  wide.tau = 0.95;
  const Report r95 = diagnose(w.f, w.trace, wide);
  std::string proxy;
  for (int i = 0; i < r.liminf_proxy.size(); ++i) proxy += (i ? " " : "") + fmt("%.4f", r.liminf_proxy(i));
  info("worst-case n=5 liminf proxies: " + proxy + "; row 2 tends to 0.6^(1/8) = 0.9381 > 0.9");
  info("same trace at tau=0.95: r_bar=" + std::to_string(r95.r_bar) + " d_lower=" +
       opt_int(r95.d_lower) + " N_lambda=" + std::to_string(r95.n_lambda) + " eps_lower=" +
       fmt("%.3e", r95.eps_lower));
}

void criterion4() {
  guarded(4, [] {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail = "Sturm slope on worst case:";
    for (int n : {3, 4, 5}) {
      const Spectrahedron f = gen_worst_case(n);
      const PathTrace t = follow(f, SymMatrix::identity(n), 0.6, 60);
      Vector ef(t.size());
      for (int j = 0; j < t.size(); ++j) ef(j) = forward_error(f, t.points[j].X);
      const double s = sturm_exponent(ef, t.berr, 10);
      const double lo = 0.8 * std::ldexp(1.0, -(n - 1));
      ok = ok && s >= lo && s <= 1.0;
      detail += " n=" + std::to_string(n) + " slope=" + fmt("%.4f", s) + " in [" + fmt("%.4f", lo) + ",1];";
    }
    const double secs = seconds_since(t0);
    verdict(4, ok && secs < 300, detail + " " + fmt("%.2f", secs) + " s (limit 300)");
  });
}

void criterion5() {
  guarded(5, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const Spectrahedron f = gen_rank_r_sd1(20, 7, 1);
    const PathTrace t = follow(f, SymMatrix::identity(20), 0.6, 60);
    const RatioCurves c = ratios(eigen_series(t), 10);
    const Report r = diagnose(f, t);
    double worst = 0;
    for (int i = 7; i < 20; ++i)
      for (int j = c.tail_first; j <= c.tail_last; ++j) worst = std::max(worst, std::abs(c.rq(i, j) - 0.6));
    const double secs = seconds_since(t0);
    verdict(5, r.r_bar == 7 && r.d_lower == 1 && r.n_lambda == 1 && worst <= 0.05 && secs < 120,
            "rank_r_sd1 n=20 r=7 (" + std::to_string(t.size()) + " points" +
                (t.truncated ? ", truncated" : "") + "): r_bar=" + std::to_string(r.r_bar) +
                " d_lower=" + opt_int(r.d_lower) + " N_lambda=" + std::to_string(r.n_lambda) +
                ", max |RQ-0.6| on vanishing rows=" + fmt("%.2e", worst) + " (<=0.05), " +
                fmt("%.2f", secs) + " s (limit 120)");
  });
}

std::vector<Spectrahedron> sweep_instances() {
  std::vector<Spectrahedron> v;
  for (int n = 2; n <= 7; ++n) v.push_back(gen_worst_case(n));
  v.push_back(gen_rank_r_sd1(6, 2, 1));
  v.push_back(gen_rank_r_sd1(8, 3, 2));
  v.push_back(gen_rank_r_sd1(10, 4, 3));
  v.push_back(gen_rank_r_sd1(12, 5, 4));
  v.push_back(gen_rank_r_sd1(12, 2, 5));
  v.push_back(gen_rank_r_sd1(9, 1, 6));
  v.push_back(gen_slater(4, 3, 1));
  v.push_back(gen_slater(6, 8, 2));
  v.push_back(gen_slater(3, 2, 3));
  v.push_back(gen_direct_sum({gen_worst_case(3), gen_worst_case(3)}));
  v.push_back(gen_direct_sum({gen_worst_case(2), gen_slater(3, 2, 4)}));
  v.push_back(gen_direct_sum({gen_worst_case(4), gen_rank_r_sd1(5, 2, 7)}));
  v.push_back(gen_direct_sum({gen_rank_r_sd1(4, 1, 8), gen_slater(3, 2, 9), gen_worst_case(2)}));
  v.push_back(gen_direct_sum({gen_worst_case(3), gen_rank_r_sd1(6, 2, 10)}));
  return v;
}

void criterion6() {
  guarded(6, [] {
    int violations = 0, instances = 0, points = 0;
    std::string notes;
    for (const Spectrahedron& f : sweep_instances()) {
      ++instances;
      const PathTrace t = follow(f, SymMatrix::identity(f.order()), 0.6, 60);
      const Report r = diagnose(f, t);
      const Certificate& c = *f.certificate;
      if (r.r_bar < *c.max_rank_true) {
        ++violations;
        notes += " " + f.name + ":r_bar";
      }
      if (r.d_lower && *r.d_lower > *c.sd_true) {
        ++violations;
        notes += " " + f.name + ":d_lower";
      }
      for (int j = 0; j < t.size(); ++j, ++points) {
        const double lower = ferror_lower_bound(Vector(t.eigs_x.row(j).transpose()), r.r_bar);
        if (lower > forward_error(f, t.points[j].X) * (1 + 1e-9)) {
          ++violations;
          notes += " " + f.name + ":eps_lower@k=" + std::to_string(j + 1);
        }
      }
    }
    verdict(6, violations == 0 && instances == 20,
            "soundness sweep: " + std::to_string(instances) + " certified instances, " +
                std::to_string(points) + " trace points, " + std::to_string(violations) +
                " violations" + notes);
  });
}

void criterion7() {
  guarded(7, [] {
    const auto t0 = std::chrono::steady_clock::now();
    const int kk = 40;
    Vector alphas(kk);
    for (int k = 0; k < kk; ++k) alphas(k) = std::pow(0.6, k + 1);
    const RatioCurves c = ratios(cexample_trace(alphas), 10);
    const RankBound b = max_rank_bound(c, 0.9);
    const int nl = count_rates(c, b.r_bar).n_lambda;
    // Log-slopes of the two vanishing diagonal entries against log alpha.
    auto slope = [&](const std::function<double(double)>& g) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      const int w = 10;
      for (int k = kk - w; k < kk; ++k) {
        const double x = std::log(alphas(k)), y = std::log(g(alphas(k)));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      return (w * sxy - sx * sy) / (w * sxx - sx * sx);
    };
    const double s22 = slope([](double a) { return a / (3 - a * a); });
    const double s33 = slope([](double a) { return a * a * a; });
    const double secs = seconds_since(t0);
    verdict(7, nl == 1 && std::abs(s22 - s33) > 0.5 && secs < 1,
            "cexample: r_bar=" + std::to_string(b.r_bar) + " N_lambda=" + std::to_string(nl) +
                " (want 1), diagonal log-slopes " + fmt("%.3f", s22) + " vs " + fmt("%.3f", s33) +
                " (want distinct), " + fmt("%.4f", secs) + " s (limit 1)");
  });
}

void criterion8() {
  guarded(8, [] {
    std::vector<Spectrahedron> fixtures;
    for (int n = 2; n <= 5; ++n) fixtures.push_back(gen_worst_case(n));
    fixtures.push_back(gen_rank_r_sd1(8, 3, 4));
    fixtures.push_back(gen_rank_r_sd1(20, 7, 1));
    fixtures.push_back(gen_slater(4, 3, 1));
    fixtures.push_back(gen_direct_sum({gen_worst_case(3), gen_worst_case(3)}));
    int cent = 0, inv = 0, lemma = 0, expo = 0, iso = 0, eig = 0, steps = 0, pts = 0;
    Rng rng(2024);
    for (const Spectrahedron& f : fixtures) {
      const int n = f.order();
      const PathTrace t = follow(f, SymMatrix::identity(n), 0.6, 60);
      for (const PathPoint& p : t.points) {
        ++pts;
        if (p.res_cent > 1e-8 * n * p.alpha) ++cent;
        const Matrix xinv = p.X.dense().llt().solve(Matrix::Identity(n, n));
        if ((p.Z.dense() - p.alpha * xinv).norm() > 1e-6 * p.Z.norm()) ++inv;
        const EigenDecomposition e = eig_desc(p.X);
        const Matrix rec = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
        if ((rec - p.X.dense()).norm() > 1e-10 * std::max(1.0, p.X.norm()) ||
            (e.vectors.transpose() * e.vectors - Matrix::Identity(n, n)).norm() > 1e-10)
          ++eig;
        Matrix g(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
        const SymMatrix y = SymMatrix::symmetrize(g);
        if (std::abs(svec(p.X).dot(svec(y)) - inner(p.X, y)) > 1e-12 * (1 + p.X.norm() * y.norm())) ++iso;
      }
      const Vector& b = f.map.rhs();
      if (b.norm() > 0 && t.size() >= 20) {
        double lo = INFINITY, hi = 0;
        for (int j = t.size() - 20; j < t.size(); ++j) {
          const double v = std::abs(t.points[j].y.dot(b)) / t.points[j].alpha;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (!(hi / lo <= 100)) ++lemma;
      }
      const FRResult fr = facial_reduction(f, FrMode::kCertified);
      const std::vector<SymMatrix> samples = certified_samples(f);
      for (const FRStep& s : fr.steps) {
        ++steps;
        const SymMatrix lifted = SymMatrix::symmetrize(s.Vk * s.Z.dense() * s.Vk.transpose());
        const ExposureCheck ec = is_exposing(f, lifted, samples);
        if (!ec.exposing || ec.trivial) ++expo;
      }
    }
    const int total = cent + inv + lemma + expo + iso + eig;
    verdict(8, total == 0,
            "invariants on " + std::to_string(fixtures.size()) + " fixtures (" + std::to_string(pts) +
                " points, " + std::to_string(steps) + " FR steps): centrality " + std::to_string(cent) +
                ", Z=alpha X^-1 " + std::to_string(inv) + ", y^T b/alpha " + std::to_string(lemma) +
                ", is_exposing " + std::to_string(expo) + ", svec isometry " + std::to_string(iso) +
                ", eig reconstruction " + std::to_string(eig) + " violations");
  });
}

}  // namespace

int main() {
  criterion1();
  criteria2and3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
