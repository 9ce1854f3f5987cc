#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sdcheck::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidSpec = 2,
  kTruncated = 3,
  kIoError = 4,
  kFrDiverged = 5,
};

struct GenConfig {
  std::string kind;  // worst-case | slater | rank-r-sd1 | direct-sum
  int n = 0;
  int m = 0;
  int r = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> children;  // instance files for direct-sum
};

struct RunConfig {
  std::vector<std::string> instances;
  GenConfig gen;  // used when no instance file is given
  double sigma = 0.6;
  int k_max = 60;
  double tau = 0.9;
  int window = 10;
  std::string b_path;  // empty means identity
  std::string out_dir;
  int jobs = 1;
};

struct FrConfig {
  std::string instance;
  std::string mode = "certified";
  std::string out_dir;
};

struct TableConfig {
  std::vector<std::string> dirs;
  std::string out_dir;
};

// Output directory: explicit value, else $SDCHECK_OUT, else "out".
std::string resolve_out_dir(const std::string& configured);

int cmd_gen(const GenConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_run(const RunConfig& cfg, std::ostream& log);
int cmd_fr(const FrConfig& cfg, std::ostream& log);
int cmd_table(const TableConfig& cfg, std::ostream& out, std::ostream& log);

int main_entry(int argc, char** argv);

}  // namespace sdcheck::cli
