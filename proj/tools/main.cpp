#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("conebellman");
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("CONEBELLMAN_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else {
    logger->set_level(spdlog::level::err);
  }
  spdlog::set_default_logger(logger);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace conebellman;
  configure_logging();

  CLI::App app{"Bellman-equation solvers for SSP, LQR and linearly solvable MDPs"};
  app.require_subcommand(1);

  cli::SolveOptions solve;
  std::string schedule = "jacobi";
  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file");
  solve_cmd->add_option("file", solve.input, "Problem JSON")->required();
  solve_cmd->add_option("--tol", solve.config.tol, "Convergence tolerance");
  solve_cmd->add_option("--max-iter", solve.config.max_iter, "Sweep limit");
  solve_cmd->add_option("--schedule", schedule, "jacobi or gauss-seidel")
      ->check(CLI::IsMember({"jacobi", "gauss-seidel"}));
  solve_cmd->add_option("--out", solve.out_dir, "Output directory");
  solve_cmd->add_flag("--trace", solve.trace, "Also write trace.csv");

  cli::VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a solve against the oracles");
  verify_cmd->add_option("file", verify.input, "Problem JSON")->required();
  verify_cmd->add_option("--seed", verify.seed, "Seed for random checks");
  verify_cmd->add_option("--trials", verify.trials, "Monte Carlo trials");

  cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time solves on generated instances");
  bench_cmd->add_option("--class", bench.problem_class, "ssp, lqr or ldp")->required();
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated sizes")->required();
  bench_cmd->add_option("--seed", bench.seed, "Generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInvalidInput;
  }

  if (*solve_cmd) {
    solve.config.schedule =
        schedule == "jacobi" ? Schedule::kJacobi : Schedule::kGaussSeidel;
    return cli::run_solve(solve, std::cout, std::cerr);
  }
  if (*verify_cmd) return cli::run_verify(verify, std::cout, std::cerr);
  return cli::run_bench(bench, std::cout, std::cerr);
}
