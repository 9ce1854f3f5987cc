#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sdcheck/bench.hpp"
#include "sdcheck/cli.hpp"
#include "sdcheck/io.hpp"

namespace sdcheck {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sdcheck_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(dump_json(Json{{"x", 0.1}}, 0), "{\"x\":0.10000000000000001}\n");
}

TEST(InstanceJson, RoundTrip) {
  for (const Spectrahedron& f : {gen_worst_case(4), gen_rank_r_sd1(6, 2, 3),
                                 gen_direct_sum({gen_worst_case(3), gen_slater(2, 1, 4)})}) {
    const std::string text = dump_json(to_json(f));
    const Spectrahedron g = instance_from_json(Json::parse(text));
    EXPECT_EQ(dump_json(to_json(g)), text);
    EXPECT_EQ(g.map.svec_matrix(), f.map.svec_matrix());
    EXPECT_EQ(*g.certificate->sd_true, *f.certificate->sd_true);
  }
}

TEST(InstanceJson, NestedRowsAndObjective) {
  const Json j = Json::parse(R"({"n": 2, "m": 1, "mats": [[[1, 0], [0, 1]]], "b": [1],
      "objective": {"C": [1, 0, 0, 0], "p_star": 0.25}})");
  const Spectrahedron f = instance_from_json(j);
  EXPECT_EQ(f.map.constraints(), 2);
  EXPECT_EQ(f.map.rhs()(1), 0.25);
}

TEST(InstanceJson, Malformed) {
  for (const char* bad : {R"({"n": 2})", R"({"n": 2, "m": 1, "mats": [[1, 2, 3, 4]], "b": [1]})",
                          R"({"n": 2, "m": 1, "mats": [[1, 0, 0]], "b": [1]})", R"([1, 2])"}) {
    try {
      instance_from_json(Json::parse(bad));
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidSpec) << bad;
    }
  }
}

TEST(Csv, Headers) {
  const Spectrahedron f = gen_worst_case(2);
  const PathTrace t = follow(f, SymMatrix::identity(2), 0.6, 15);
  std::ostringstream a, b;
  write_trace_csv(a, t);
  write_curves_csv(b, ratios(eigen_series(t)));
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "k,alpha,i,lambda_X,lambda_Z,res_primal,res_dual,res_cent,berr");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "i,k,RQ,RN");
  const std::string trace = a.str();
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 1 + 15 * 2);
}

TEST(Cli, GenRunTableFr) {
  const fs::path dir = scratch("flow");
  std::ostringstream log, out;
  cli::GenConfig g;
  g.kind = "worst-case";
  g.n = 4;
  const std::string inst = (dir / "wc4.json").string();
  ASSERT_EQ(cli::cmd_gen(g, inst, log), cli::kOk);
  const std::string first = slurp(inst);
  ASSERT_EQ(cli::cmd_gen(g, inst, log), cli::kOk);
  EXPECT_EQ(slurp(inst), first);

  cli::RunConfig r;
  r.instances = {inst};
  r.out_dir = (dir / "run").string();
  EXPECT_EQ(cli::cmd_run(r, log), cli::kOk);
  for (const char* f : {"trace.csv", "curves.csv", "report.json"}) EXPECT_TRUE(fs::exists(dir / "run" / f));
  const Json rep = read_json_file((dir / "run" / "report.json").string());
  EXPECT_EQ(rep["table_row"]["sd_true"], 3);

  cli::TableConfig t;
  t.dirs = {(dir / "run").string()};
  t.out_dir = dir.string();
  EXPECT_EQ(cli::cmd_table(t, out, log), cli::kOk);
  EXPECT_NE(slurp(dir / "table.csv").find("instance,berr_final,r_true,r_bar,ef_oracle"), std::string::npos);

  cli::FrConfig fr;
  fr.instance = inst;
  fr.out_dir = (dir / "fr").string();
  EXPECT_EQ(cli::cmd_fr(fr, log), cli::kOk);
  EXPECT_EQ(read_json_file((dir / "fr" / "fr.json").string())["d"], 3);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("codes");
  std::ostringstream log, out;
  cli::GenConfig bad;
  bad.kind = "worst-case";
  bad.n = 1;
  EXPECT_EQ(cli::cmd_gen(bad, (dir / "x.json").string(), log), cli::kInvalidSpec);

  cli::RunConfig missing;
  missing.instances = {(dir / "nope.json").string()};
  missing.out_dir = (dir / "m").string();
  EXPECT_EQ(cli::cmd_run(missing, log), cli::kIoError);

  cli::TableConfig empty;
  EXPECT_EQ(cli::cmd_table(empty, out, log), cli::kInvalidSpec);

  cli::RunConfig bad_tau;
  bad_tau.gen.kind = "worst-case";
  bad_tau.gen.n = 3;
  bad_tau.tau = 0.99;
  bad_tau.out_dir = (dir / "t").string();
  EXPECT_EQ(cli::cmd_run(bad_tau, log), cli::kInvalidSpec);

  cli::GenConfig g;
  g.kind = "worst-case";
  g.n = 5;
  const std::string inst = (dir / "wc5.json").string();
  ASSERT_EQ(cli::cmd_gen(g, inst, log), cli::kOk);
  cli::FrConfig fr;
  fr.instance = inst;
  fr.mode = "numerical";
  fr.out_dir = (dir / "fr").string();
  EXPECT_EQ(cli::cmd_fr(fr, log), cli::kFrDiverged);
  EXPECT_TRUE(read_json_file((dir / "fr" / "fr.json").string()).contains("error"));
}

TEST(Cli, TruncatedRunStillWritesArtifacts) {
  const fs::path dir = scratch("trunc");
  std::ostringstream log;
  cli::RunConfig r;
  r.gen.kind = "worst-case";
  r.gen.n = 3;
  r.k_max = 5;  // too short for the tail window
  r.out_dir = dir.string();
  EXPECT_EQ(cli::cmd_run(r, log), cli::kTruncated);
  EXPECT_TRUE(fs::exists(dir / "trace.csv"));
  EXPECT_TRUE(read_json_file((dir / "report.json").string()).contains("diagnostics_error"));
}

TEST(Cli, EnvironmentOutputDirectory) {
  const fs::path dir = scratch("env");
  setenv("SDCHECK_OUT", dir.string().c_str(), 1);
  EXPECT_EQ(cli::resolve_out_dir(""), dir.string());
  EXPECT_EQ(cli::resolve_out_dir("explicit"), "explicit");
  std::ostringstream log;
  cli::GenConfig g;
  g.kind = "worst-case";
  g.n = 3;
  EXPECT_EQ(cli::cmd_gen(g, "", log), cli::kOk);
  EXPECT_TRUE(fs::exists(dir / "worst_case_n3.json"));
  unsetenv("SDCHECK_OUT");
}

TEST(Cli, ParallelJobsMatchSerial) {
  const fs::path dir = scratch("jobs");
  std::ostringstream log;
  std::vector<std::string> files;
  for (int n : {2, 3, 4}) {
    cli::GenConfig g;
    g.kind = "worst-case";
    g.n = n;
    files.push_back((dir / ("w" + std::to_string(n) + ".json")).string());
    ASSERT_EQ(cli::cmd_gen(g, files.back(), log), cli::kOk);
  }
  cli::RunConfig r;
  r.instances = files;
  r.out_dir = (dir / "serial").string();
  ASSERT_EQ(cli::cmd_run(r, log), cli::kOk);
  r.out_dir = (dir / "par").string();
  r.jobs = 3;
  ASSERT_EQ(cli::cmd_run(r, log), cli::kOk);
  for (const char* stem : {"w2", "w3", "w4"})
    EXPECT_EQ(slurp(dir / "serial" / stem / "report.json"), slurp(dir / "par" / stem / "report.json"));
}

}  // namespace
}  // namespace sdcheck
