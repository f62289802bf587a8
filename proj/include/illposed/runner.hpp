#pragma once

#include "illposed/linalg.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace illposed {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Seed used by the CLI when none is given; pinned so the recorded golden
/// values and the protocol checks all refer to one fixed noise draw.
inline constexpr std::uint64_t kDefaultSeed = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNumerical = 2,
  kExitInvariant = 3,
};

struct RunSpec {
  std::string problem = "shaw";
  Index n = 1024;
  double eps = 1e-3;
  std::uint64_t seed = kDefaultSeed;
  int kmax = 60;
  std::vector<std::string> methods = {"tsvd", "lsqr", "hybrid"};
  std::string out = ".";
  bool force = false;
};

/// Throws UsageError on any violated field constraint.
void validate_spec(const RunSpec& spec);

/// Parse one `key = value` spec file ('#' comments, blank lines ignored).
RunSpec parse_spec_file(const std::string& path);

std::vector<std::string> split_methods(const std::string& csv);

int run_generate(const RunSpec& spec);
int run_solve(const RunSpec& spec);
int run_diagnose(const RunSpec& spec);

/// Execute the RunSpec files listed in `specs_file` (one path per line) on a
/// bounded worker pool and merge summary.csv into `out_dir`.
int run_sweep(const std::string& specs_file, const std::string& out_dir, int workers);

/// Print the manifest and summary found in a run or sweep directory.
int run_report(const std::string& out_dir);

}  // namespace illposed
