#include "sdcheck/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sdcheck {

namespace {

Json flat(const Matrix& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Json nested(const Matrix& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Json vec(const Vector& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

template <typename T>
Json opt(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Matrix dense_from_json(const Json& j, int rows, int cols) {
  if (!j.is_array()) fail(Errc::kInvalidSpec, "matrix must be an array");
  Matrix m(rows, cols);
  if (j.size() == static_cast<size_t>(rows) && rows > 0 && j[0].is_array()) {
    for (int i = 0; i < rows; ++i) {
      if (j[i].size() != static_cast<size_t>(cols)) fail(Errc::kInvalidSpec, "ragged matrix row");
      for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
  }
  if (j.size() != static_cast<size_t>(rows) * cols)
    fail(Errc::kInvalidSpec, "matrix has " + std::to_string(j.size()) + " entries, expected " +
                                 std::to_string(rows * cols));
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) m(i, c) = j[i * cols + c].get<double>();
  return m;
}

Vector vector_from_json(const Json& j, int len) {
  if (!j.is_array() || j.size() != static_cast<size_t>(len))
    fail(Errc::kInvalidSpec, "vector must have " + std::to_string(len) + " entries");
  Vector v(len);
  for (int i = 0; i < len; ++i) v(i) = j[i].get<double>();
  return v;
}

void dump_rec(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? "\n" + std::string((depth + 1) * indent, ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(depth * indent, ' ') : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",";
        first = false;
        out += pad + Json(it.key()).dump() + (indent > 0 ? ": " : ":");
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool scalar = true;
      for (const auto& e : j) scalar = scalar && !e.is_structured();
      out += "[";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += scalar ? ", " : ",";
        if (!scalar) out += pad;
        dump_rec(j[i], indent, depth + 1, out);
      }
      out += (scalar ? "" : close) + "]";
      return;
    }
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Spectrahedron& f) {
  Json j;
  if (!f.name.empty()) j["name"] = f.name;
  j["n"] = f.order();
  j["m"] = f.map.constraints();
  Json mats = Json::array();
  for (const SymMatrix& a : f.map.mats()) mats.push_back(flat(a.dense()));
  j["mats"] = mats;
  j["b"] = vec(f.map.rhs());
  if (f.certificate) {
    const Certificate& c = *f.certificate;
    Json cj = Json::object();
    if (c.sd_true) cj["sd_true"] = *c.sd_true;
    if (c.max_rank_true) cj["max_rank_true"] = *c.max_rank_true;
    if (c.singleton_solution) cj["singleton_solution"] = flat(c.singleton_solution->dense());
    if (c.solution_face) {
      cj["solution_face"] = {{"r", c.solution_face->rank()},
                             {"V", flat(c.solution_face->V)},
                             {"W", flat(c.solution_face->W.dense())}};
    }
    if (c.exposing_chain) {
      Json chain = Json::array();
      for (const ExposingStep& s : *c.exposing_chain)
        chain.push_back({{"y", vec(s.y)}, {"Z", flat(s.Z.dense())}});
      cj["exposing_chain"] = chain;
    }
    if (c.relint_point) cj["relint_point"] = flat(c.relint_point->dense());
    j["certificate"] = cj;
  }
  return j;
}

SymMatrix sym_from_json(const Json& j, int n) {
  try {
    return SymMatrix(dense_from_json(j, n, n));
  } catch (const Error& e) {
    if (e.code() == Errc::kInvalidSpec) throw;
    fail(Errc::kInvalidSpec, e.what());
  }
}

Spectrahedron instance_from_json(const Json& j) {
  try {
    if (!j.is_object()) fail(Errc::kInvalidSpec, "instance must be a JSON object");
    const int n = j.at("n").get<int>();
    const int m = j.at("m").get<int>();
    if (n < 1 || m < 0) fail(Errc::kInvalidSpec, "need n >= 1 and m >= 0");
    const Json& mj = j.at("mats");
    if (!mj.is_array() || mj.size() != static_cast<size_t>(m))
      fail(Errc::kInvalidSpec, "mats must hold m matrices");
    std::vector<SymMatrix> mats;
    for (const Json& a : mj) mats.push_back(sym_from_json(a, n));
    Spectrahedron f;
    f.name = j.value("name", std::string());
    f.map = LinearMap(n, std::move(mats), vector_from_json(j.at("b"), m));

    if (j.contains("certificate")) {
      const Json& cj = j.at("certificate");
      Certificate c;
      if (cj.contains("sd_true")) c.sd_true = cj.at("sd_true").get<int>();
      if (cj.contains("max_rank_true")) c.max_rank_true = cj.at("max_rank_true").get<int>();
      if (cj.contains("singleton_solution"))
        c.singleton_solution = sym_from_json(cj.at("singleton_solution"), n);
      if (cj.contains("solution_face")) {
        const Json& fj = cj.at("solution_face");
        const int r = fj.at("r").get<int>();
        if (r < 0 || r > n) fail(Errc::kInvalidSpec, "face rank out of range");
        FaceRep face{dense_from_json(fj.at("V"), n, r), sym_from_json(fj.at("W"), n)};
        face.validate();
        c.solution_face = std::move(face);
      }
      if (cj.contains("exposing_chain")) {
        std::vector<ExposingStep> chain;
        for (const Json& s : cj.at("exposing_chain"))
          chain.push_back({vector_from_json(s.at("y"), m), sym_from_json(s.at("Z"), n)});
        c.exposing_chain = std::move(chain);
      }
      if (cj.contains("relint_point")) c.relint_point = sym_from_json(cj.at("relint_point"), n);
      f.certificate = std::move(c);
    }
    if (j.contains("objective")) {
      const Json& oj = j.at("objective");
      f = fold_objective(f, sym_from_json(oj.at("C"), n), oj.at("p_star").get<double>());
    }
    return f;
  } catch (const Json::exception& e) {
    fail(Errc::kInvalidSpec, std::string("malformed instance: ") + e.what());
  }
}

Json to_json(const FRResult& r) {
  Json j;
  j["d"] = r.d;
  j["r"] = r.r;
  j["mode"] = fr_mode_name(r.mode);
  Json steps = Json::array();
  for (const FRStep& s : r.steps)
    steps.push_back({{"q", s.q}, {"y", vec(s.y)}, {"Z", nested(s.Z.dense())}});
  j["steps"] = steps;
  return j;
}

Json to_json(const Report& r) {
  Json j;
  j["r_bar"] = r.r_bar;
  j["eps_lower"] = r.eps_lower;
  j["d_lower"] = opt(r.d_lower);
  j["N_lambda"] = r.n_lambda;
  j["tau"] = r.tau;
  j["ladder"] = r.ladder;
  j["liminf_proxy"] = vec(r.liminf_proxy);
  Json v = Json::object();
  for (const auto& [k, val] : r.verdicts) v[k] = val;
  j["verdicts"] = v;
  j["sturm_exponent"] = opt(r.sturm);
  j["table_row"] = {{"berr_final", r.berr_final},   {"r_true", opt(r.r_true)},
                    {"r_bar", r.r_bar},             {"ef_oracle", opt(r.ef_oracle)},
                    {"eps_lower", r.eps_lower},     {"sd_true", opt(r.sd_true)},
                    {"d_lower", opt(r.d_lower)},    {"N_lambda", r.n_lambda}};
  return j;
}

void write_trace_csv(std::ostream& os, const PathTrace& trace) {
  os << "k,alpha,i,lambda_X,lambda_Z,res_primal,res_dual,res_cent,berr\n";
  for (int j = 0; j < trace.size(); ++j) {
    const PathPoint& p = trace.points[j];
    for (int i = 0; i < trace.eigs_x.cols(); ++i) {
      os << j + 1 << ',' << format_double(p.alpha) << ',' << i + 1 << ','
         << format_double(trace.eigs_x(j, i)) << ',' << format_double(trace.eigs_z(j, i)) << ','
         << format_double(p.res_primal) << ',' << format_double(p.res_dual) << ','
         << format_double(p.res_cent) << ',' << format_double(trace.berr(j)) << '\n';
    }
  }
}

void write_curves_csv(std::ostream& os, const RatioCurves& c) {
  os << "i,k,RQ,RN\n";
  const int n = static_cast<int>(c.rq.rows());
  const int kk = static_cast<int>(c.rq.cols()) + 1;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < kk; ++k) {
      os << i + 1 << ',' << k + 1 << ',';
      if (k + 1 < kk) os << format_double(c.rq(i, k));
      os << ',';
      if (i + 1 < n) os << format_double(c.rn(i, k));
      os << '\n';
    }
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::kIo, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(Errc::kInvalidSpec, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::kIo, "cannot write " + path);
  out << text;
  if (!out) fail(Errc::kIo, "write failed for " + path);
}

}  // namespace sdcheck
