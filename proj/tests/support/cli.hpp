#pragma once

// Shell-out harness for the CLI plus the golden-case manifest shared by
// the unit tests and the acceptance runner.
//
// Regenerating goldens after an intentional output change:
//   PSEUDOQ_REGEN_GOLDEN=1 ./pseudoq_tests "[golden]"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace cli {

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream f(path, std::ios::binary);
  f << data;
}

// `cmd` is everything after the binary path. Env assignments may be
// prefixed via `env_prefix` ("SEED=7 " etc).
inline Result run(const std::string& binary, const std::string& cmd,
                  const std::string& stdin_data = "",
                  const std::string& env_prefix = "") {
  static int counter = 0;
  const std::string base = "/tmp/pseudoq_t" + std::to_string(::getpid()) +
                           "_" + std::to_string(counter++);
  const std::string fin = base + ".in";
  const std::string fout = base + ".out";
  const std::string ferr = base + ".err";
  write_file(fin, stdin_data);

  const std::string full = env_prefix + binary + " " + cmd + " < " + fin +
                           " > " + fout + " 2> " + ferr;
  const int status = std::system(full.c_str());

  Result r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(fout);
  r.err = read_file(ferr);
  std::remove(fin.c_str());
  std::remove(fout.c_str());
  std::remove(ferr.c_str());
  return r;
}

struct GoldenCase {
  const char* name;       // expected file is expected/<name>.json
  const char* args;       // {G} expands to the golden directory
  int exit_code;
  bool compare_stderr;    // negative/error cases put the payload on stderr
};

inline const std::vector<GoldenCase>& golden_cases() {
  static const std::vector<GoldenCase> cases = {
      {"flip_state_00", "flip {G}/inputs/state_00.json", 0, false},
      {"flip_op2_identity", "flip {G}/inputs/op2_identity.json", 0, false},
      {"flip_op4_swap", "flip {G}/inputs/op4_swap.json", 0, false},
      {"flip_density_rejected", "flip {G}/inputs/density_maxmix.json", 2, true},
      {"analyze_maxmix", "analyze {G}/inputs/density_maxmix.json", 0, false},
      {"analyze_bell", "analyze {G}/inputs/density_bell.json", 0, false},
      {"analyze_werner08", "analyze {G}/inputs/density_werner08.json", 0, false},
      {"analyze_degenerate", "analyze {G}/inputs/density_prod00.json", 3, true},
      {"check_werner_self",
       "check {G}/inputs/density_werner08.json {G}/inputs/density_werner08.json",
       0, false},
      {"check_bell_vs_maxmix",
       "check {G}/inputs/density_bell.json {G}/inputs/density_maxmix.json", 1,
       false},
      {"check_pure06_vs_bell",
       "check {G}/inputs/density_pure06.json {G}/inputs/density_bell.json", 0,
       false},
      {"synth_pure06_to_bell",
       "synth {G}/inputs/density_pure06.json {G}/inputs/density_bell.json", 0,
       false},
      {"synth_bell_self",
       "synth {G}/inputs/density_bell.json {G}/inputs/density_bell.json", 0,
       false},
      {"synth_rejected",
       "synth {G}/inputs/density_bell.json {G}/inputs/density_maxmix.json", 1,
       true},
      {"apply_identity",
       "apply {G}/inputs/density_werner08.json {G}/inputs/op2_identity.json "
       "{G}/inputs/op2_identity.json",
       0, false},
      {"apply_projector",
       "apply {G}/inputs/density_maxmix.json {G}/inputs/op2_diag10.json "
       "{G}/inputs/op2_identity.json",
       0, false},
      {"apply_select11",
       "apply {G}/inputs/density_bell.json {G}/inputs/op2_diag01.json "
       "{G}/inputs/op2_diag01.json",
       0, false},
      {"repmat_identity",
       "repmat {G}/inputs/op2_diag22.json {G}/inputs/op2_identity.json", 0,
       false},
      {"repmat_pair",
       "repmat {G}/inputs/op2_a.json {G}/inputs/op2_b.json", 0, false},
      {"factor_product", "factor {G}/inputs/op4_product.json", 0, false},
      {"factor_swap", "factor {G}/inputs/op4_swap.json", 1, true},
      {"factor_cnot", "factor {G}/inputs/op4_cnot.json", 1, true},
      {"selftest_short", "selftest --rounds 3", 0, false},
  };
  return cases;
}

inline std::string expand(std::string s, const std::string& golden_dir) {
  std::string::size_type pos;
  while ((pos = s.find("{G}")) != std::string::npos)
    s.replace(pos, 3, golden_dir);
  return s;
}

}  // namespace cli
