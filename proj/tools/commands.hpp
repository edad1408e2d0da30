#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "conebellman/errors.hpp"
#include "conebellman/fixed_point.hpp"

namespace conebellman::cli {

enum ExitStatus : int {
  kExitSolved = 0,
  kExitDiverged = 2,
  kExitInvalidInput = 3,
  kExitVerificationFailed = 4,
};

int exit_status(ErrorCode code);

struct SolveOptions {
  std::filesystem::path input;
  SolveConfig config;
  std::filesystem::path out_dir = ".";
  bool trace = false;
};

struct VerifyOptions {
  std::filesystem::path input;
  std::uint64_t seed = 0;
  std::size_t trials = 10000;
};

struct BenchOptions {
  std::string problem_class;
  std::string sizes;
  std::uint64_t seed = 0;
};

// Each command reports to `out` (results) and `err` (diagnostics) and
// returns the process exit status.
int run_solve(const SolveOptions& options, std::ostream& out, std::ostream& err);
int run_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err);

}  // namespace conebellman::cli
