#pragma once

#include <string>
#include <vector>

#include "output.hpp"

namespace loggas::cli {

// Flags shared by every command; command-specific values ride along.
struct RunConfig {
  std::string command;  // e.g. "phase classify", "verify string"
  std::string t = "0";
  std::string N;
  int n_max = -1;
  int bits = 256;
  std::string out;
  std::string format;
  int samples = -1;
  bool no_meta = false;

  // phase
  std::string grid;  // "re_min,re_max,im_min,im_max"
  int threads = 0;
  bool graph = false;
  std::string arc;
  double radius = 10.0;
  // recur
  std::string method = "recursion";
  // verify / freeenergy
  double tol = -1;
  double h = 1e-3;
  std::string z = "2,2";
  double fraction = 0.5;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  int exit_code = 0;  // 3 when a verification ran but did not pass
};

// Checks flag combinations before any computation. Throws ValidationError.
void validate(const RunConfig& rc);

Outcome cmd_phase_classify(const RunConfig& rc);
Outcome cmd_phase_boundary(const RunConfig& rc);
Outcome cmd_scurve(const RunConfig& rc);
Outcome cmd_equilibrium(const RunConfig& rc);
Outcome cmd_recur(const RunConfig& rc);
Outcome cmd_verify(const RunConfig& rc);
Outcome cmd_freeenergy(const RunConfig& rc);

Outcome dispatch(const RunConfig& rc);

// Entry point used by the executable and the tests. Returns the process exit code:
// 0 success, 2 validation error, 3 numerical failure, 4 topology mismatch.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loggas::cli
