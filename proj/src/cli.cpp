#include "sdcheck/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "sdcheck/bench.hpp"
#include "sdcheck/io.hpp"

namespace sdcheck::cli {

namespace fs = std::filesystem;

namespace {

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::kIo: return kIoError;
    case Errc::kFRDiverged:
    case Errc::kSdUndecided: return kFrDiverged;
    case Errc::kMaxIterations:
    case Errc::kLineSearchStall:
    case Errc::kInsufficientTrace: return kTruncated;
    default: return kInvalidSpec;
  }
}

Spectrahedron load_instance(const std::string& path) {
  return instance_from_json(read_json_file(path));
}

Spectrahedron generate(const GenConfig& g) {
  if (g.kind == "worst-case") return gen_worst_case(g.n);
  if (g.kind == "slater") return gen_slater(g.n, g.m, g.seed);
  if (g.kind == "rank-r-sd1") return gen_rank_r_sd1(g.n, g.r, g.seed);
  if (g.kind == "direct-sum") {
    std::vector<Spectrahedron> kids;
    for (const std::string& p : g.children) kids.push_back(load_instance(p));
    return gen_direct_sum(kids);
  }
  fail(Errc::kInvalidSpec, "unknown generator '" + g.kind + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::string label_for(const Spectrahedron& f, const std::string& path, size_t index) {
  if (!path.empty()) return fs::path(path).stem().string();
  if (!f.name.empty()) return f.name;
  return "instance" + std::to_string(index);
}

int run_one(const RunConfig& cfg, const std::string& path, const fs::path& dir,
            std::ostream& log, std::mutex& log_mu) {
  auto say = [&](const std::string& s) {
    std::lock_guard<std::mutex> lock(log_mu);
    log << s << '\n';
  };
  try {
    const Spectrahedron f = path.empty() ? generate(cfg.gen) : load_instance(path);
    const int n = f.order();
    const SymMatrix b_dir =
        cfg.b_path.empty() ? SymMatrix::identity(n) : sym_from_json(read_json_file(cfg.b_path), n);
    if (!(cfg.tau > 0 && cfg.tau <= 0.95)) fail(Errc::kInvalidSpec, "tau must lie in (0, 0.95]");
    const int floor_k = conditioning_kmax(cfg.sigma);
    if (cfg.k_max > floor_k)
      say("warning: k_max " + std::to_string(cfg.k_max) + " reduced to " + std::to_string(floor_k) +
          " so that sigma^k stays above 1e-13");

    const PathTrace trace = follow(f, b_dir, cfg.sigma, cfg.k_max);
    ensure_dir(dir);
    {
      std::ostringstream os;
      write_trace_csv(os, trace);
      write_text_file((dir / "trace.csv").string(), os.str());
    }
    if (trace.truncated) say("warning: path truncated at " + trace.truncation_reason);

    Json report;
    report["instance"] = f.name.empty() ? label_for(f, path, 0) : f.name;
    report["n"] = n;
    report["m"] = f.map.constraints();
    report["sigma"] = cfg.sigma;
    report["k_max"] = std::min(cfg.k_max, floor_k);
    report["trace"] = {{"points", trace.size()},
                       {"truncated", trace.truncated},
                       {"reason", trace.truncation_reason}};
    try {
      const RatioCurves curves = ratios(eigen_series(trace), cfg.window);
      std::ostringstream os;
      write_curves_csv(os, curves);
      write_text_file((dir / "curves.csv").string(), os.str());
      DiagnoseOptions dopts;
      dopts.tau = cfg.tau;
      dopts.window = cfg.window;
      const Json diag = to_json(diagnose(f, trace, dopts));
      for (auto it = diag.begin(); it != diag.end(); ++it) report[it.key()] = it.value();
    } catch (const Error& e) {
      if (e.code() != Errc::kInsufficientTrace) throw;
      report["diagnostics_error"] = e.what();
      write_text_file((dir / "report.json").string(), dump_json(report));
      say(report["instance"].get<std::string>() + ": " + e.what());
      return kTruncated;
    }
    write_text_file((dir / "report.json").string(), dump_json(report));
    say(report["instance"].get<std::string>() + ": r_bar=" + std::to_string(report["r_bar"].get<int>()) +
        " d_lower=" + (report["d_lower"].is_null() ? "null" : std::to_string(report["d_lower"].get<int>())) +
        " N_lambda=" + std::to_string(report["N_lambda"].get<int>()) + " -> " + dir.string());
    return trace.truncated ? kTruncated : kOk;
  } catch (const Error& e) {
    say("error: " + std::string(e.what()));
    return exit_code_for(e);
  }
}

std::string cell(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string resolve_out_dir(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("SDCHECK_OUT"); env && *env) return env;
  return "out";
}

int cmd_gen(const GenConfig& cfg, const std::string& out_path, std::ostream& log) {
  try {
    const Spectrahedron f = generate(cfg);
    std::string path = out_path;
    if (path.empty()) {
      const fs::path dir = resolve_out_dir("");
      ensure_dir(dir);
      path = (dir / (f.name + ".json")).string();
    }
    write_text_file(path, dump_json(to_json(f)));
    log << path << '\n';
    return kOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_run(const RunConfig& cfg, std::ostream& log) {
  const fs::path root = resolve_out_dir(cfg.out_dir);
  std::vector<std::string> inputs = cfg.instances;
  if (inputs.empty()) inputs.push_back("");
  std::vector<int> codes(inputs.size(), kOk);
  std::mutex log_mu;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < inputs.size(); i = next++) {
      const fs::path dir =
          inputs.size() == 1 ? root : root / fs::path(inputs[i]).stem();
      codes[i] = run_one(cfg, inputs[i], dir, log, log_mu);
    }
  };
  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(inputs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  // Report the most severe outcome; I/O problems outrank solver truncation.
  auto rank = [](int c) { return c == kOk ? 0 : c == kTruncated ? 1 : c == kFrDiverged ? 2 : c == kInvalidSpec ? 3 : 4; };
  return *std::max_element(codes.begin(), codes.end(),
                           [&](int a, int b) { return rank(a) < rank(b); });
}

int cmd_fr(const FrConfig& cfg, std::ostream& log) {
  try {
    const Spectrahedron f = load_instance(cfg.instance);
    FrMode mode;
    if (cfg.mode == "certified") {
      mode = FrMode::kCertified;
    } else if (cfg.mode == "numerical") {
      mode = FrMode::kNumerical;
    } else {
      fail(Errc::kInvalidSpec, "mode must be certified or numerical");
    }
    const fs::path dir = resolve_out_dir(cfg.out_dir);
    ensure_dir(dir);
    const std::string path = (dir / "fr.json").string();
    try {
      const FRResult r = facial_reduction(f, mode);
      Json j = to_json(r);
      j["sd"] = r.r == 0 ? 1 : r.d;
      write_text_file(path, dump_json(j));
      log << "d=" << r.d << " r=" << r.r << " -> " << path << '\n';
      return kOk;
    } catch (const FrError& e) {
      Json j = to_json(e.partial());
      j["error"] = e.what();
      write_text_file(path, dump_json(j));
      log << "error: " << e.what() << " (partial chain in " << path << ")\n";
      return kFrDiverged;
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int cmd_table(const TableConfig& cfg, std::ostream& out, std::ostream& log) {
  if (cfg.dirs.empty()) {
    log << "error: no run directories given\n";
    return kInvalidSpec;
  }
  static const std::vector<std::string> cols{"berr_final", "r_true", "r_bar", "ef_oracle",
                                             "eps_lower", "sd_true", "d_lower", "N_lambda"};
  try {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"instance"};
    header.insert(header.end(), cols.begin(), cols.end());
    rows.push_back(header);
    for (const std::string& d : cfg.dirs) {
      const Json rep = read_json_file((fs::path(d) / "report.json").string());
      std::vector<std::string> row{rep.value("instance", fs::path(d).filename().string())};
      const Json& t = rep.contains("table_row") ? rep.at("table_row") : Json::object();
      for (const std::string& c : cols) row.push_back(t.contains(c) ? cell(t.at(c)) : "null");
      rows.push_back(row);
    }
    std::ostringstream csv;
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
      csv << '\n';
    }
    const fs::path dir = resolve_out_dir(cfg.out_dir);
    ensure_dir(dir);
    write_text_file((dir / "table.csv").string(), csv.str());

    std::vector<size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
      for (size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        out << (i ? "  " : "") << row[i];
        if (i + 1 < row.size()) out << std::string(width[i] - row[i].size(), ' ');
      }
      out << '\n';
    }
    return kOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Rate diagnostics for spectrahedron feasibility problems"};
  app.require_subcommand(1);

  GenConfig gen;
  std::string gen_out;
  auto add_gen_flags = [](CLI::App* sub, GenConfig& g) {
    sub->add_option("--n", g.n, "matrix order");
    sub->add_option("--m", g.m, "constraint count (slater)");
    sub->add_option("--r", g.r, "face rank (rank-r-sd1)");
    sub->add_option("--seed", g.seed, "random seed");
    sub->add_option("--child", g.children, "child instance file (direct-sum)");
  };
  CLI::App* g = app.add_subcommand("gen", "generate a benchmark instance");
  g->add_option("kind", gen.kind, "worst-case | slater | rank-r-sd1 | direct-sum")->required();
  add_gen_flags(g, gen);
  g->add_option("-o,--out", gen_out, "output file");

  RunConfig run;
  CLI::App* r = app.add_subcommand("run", "follow the central path and diagnose");
  r->add_option("instances", run.instances, "instance JSON files");
  r->add_option("--kind", run.gen.kind, "generate the instance instead of reading it");
  add_gen_flags(r, run.gen);
  r->add_option("--sigma", run.sigma)->capture_default_str();
  r->add_option("--k-max", run.k_max)->capture_default_str();
  r->add_option("--tau", run.tau)->capture_default_str();
  r->add_option("--window", run.window)->capture_default_str();
  r->add_option("--B", run.b_path, "perturbation direction (JSON matrix); identity if omitted");
  r->add_option("--out-dir", run.out_dir, "output directory (default $SDCHECK_OUT or out)");
  r->add_option("--jobs", run.jobs, "instances processed concurrently")->capture_default_str();

  FrConfig fr;
  CLI::App* f = app.add_subcommand("fr", "facial reduction");
  f->add_option("instance", fr.instance)->required();
  f->add_option("--mode", fr.mode)->check(CLI::IsMember({"certified", "numerical"}))->capture_default_str();
  f->add_option("--out-dir", fr.out_dir);

  TableConfig table;
  CLI::App* t = app.add_subcommand("table", "collect run reports into one table");
  t->add_option("dirs", table.dirs, "run directories");
  t->add_option("--out-dir", table.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidSpec;
  }

  if (g->parsed()) return cmd_gen(gen, gen_out, std::cerr);
  if (r->parsed()) {
    if (run.instances.empty() && run.gen.kind.empty()) {
      std::cerr << "error: give instance files or --kind\n";
      return kInvalidSpec;
    }
    return cmd_run(run, std::cerr);
  }
  if (f->parsed()) return cmd_fr(fr, std::cerr);
  return cmd_table(table, std::cout, std::cerr);
}

}  // namespace sdcheck::cli
