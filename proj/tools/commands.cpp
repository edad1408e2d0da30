#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <variant>
#include <vector>

#include <spdlog/spdlog.h>

#include "conebellman/instances.hpp"
#include "conebellman/linalg.hpp"
#include "conebellman/oracle.hpp"
#include "problem_io.hpp"

namespace conebellman::cli {

namespace {

using nlohmann::json;

// Verification always solves tighter than the solve default.
constexpr double kVerifyTol = 1e-12;
constexpr std::size_t kOracleSweeps = 1000000;
constexpr std::size_t kPerturbations = 100;
constexpr std::size_t kRolloutHorizon = 10000;

double sup_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

// Lifts a reduced LDP solution back to the original state indices. Goal
// columns keep their passive dynamics; the optimal goal mass of a non-goal
// column is split over goals in proportion to the passive probabilities.
struct LiftedLdp {
  Eigen::VectorXd lambda;
  Eigen::VectorXd z;
  Eigen::MatrixXd policy;
};

LiftedLdp lift(const LdpProblem& problem, const LdpSolution& sol) {
  const Eigen::Index n = problem.num_states();
  LiftedLdp out{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n), problem.passive};
  const auto& states = sol.reduced.states;
  for (std::size_t a = 0; a < states.size(); ++a) {
    const Eigen::Index i = states[a];
    const auto ra = static_cast<Eigen::Index>(a);
    out.lambda(i) = sol.lambda(ra);
    out.z(i) = sol.z(ra);
    out.policy.col(i).setZero();
    for (std::size_t b = 0; b < states.size(); ++b) {
      out.policy(states[b], i) = sol.policy(static_cast<Eigen::Index>(b), ra);
    }
    const double passive_goal = sol.reduced.goal_mass(ra);
    if (passive_goal > 0.0) {
      const double scale = (1.0 - sol.policy.col(ra).sum()) / passive_goal;
      for (const auto g : problem.goals) out.policy(g, i) = scale * problem.passive(g, i);
    }
  }
  return out;
}

json solution_json(const io::Problem& problem, const SolveConfig& cfg, bool want_trace,
                   ConvergenceTrace& trace) {
  json doc;
  doc["type"] = io::problem_type(problem);
  doc["status"] = "solved";
  if (const auto* p = std::get_if<SspProblem>(&problem)) {
    auto sol = solve_ssp(*p, cfg);
    doc["lambda"] = io::vector_json(sol.lambda);
    doc["gain"] = io::matrix_json(sol.gain);
    doc["residuals"] = {{"stationarity", sol.stationarity}};
    doc["closed_loop_radius"] = sol.closed_loop_radius;
    doc["iterations"] = sol.trace.iterations();
    trace = std::move(sol.trace);
  } else if (const auto* g = std::get_if<SspGraph>(&problem)) {
    const auto compiled = compile(*g);
    auto sol = solve_ssp(compiled.problem, cfg);
    doc["lambda"] = io::vector_json(values_by_node(compiled, sol.lambda));
    doc["policy"] = policy_from_gain(compiled, sol.gain);
    doc["gain"] = io::matrix_json(sol.gain);
    doc["residuals"] = {{"stationarity", sol.stationarity}};
    doc["closed_loop_radius"] = sol.closed_loop_radius;
    doc["iterations"] = sol.trace.iterations();
    trace = std::move(sol.trace);
  } else if (const auto* q = std::get_if<LqrProblem>(&problem)) {
    auto sol = solve_lqr(*q, cfg);
    for (const auto& w : sol.warnings) spdlog::warn("{}", w);
    doc["lambda"] = io::matrix_json(sol.lambda);
    doc["gain"] = io::matrix_json(sol.gain);
    doc["residuals"] = {{"stationarity", sol.stationarity},
                        {"riccati", sol.riccati_residual}};
    doc["closed_loop_radius"] = sol.closed_loop_radius;
    doc["iterations"] = sol.trace.iterations();
    doc["warnings"] = sol.warnings;
    trace = std::move(sol.trace);
  } else {
    const auto& l = std::get<LdpProblem>(problem);
    auto sol = solve_ldp(l, cfg);
    const auto lifted = lift(l, sol);
    doc["lambda"] = io::vector_json(lifted.lambda);
    doc["z"] = io::vector_json(lifted.z);
    doc["Pstar"] = io::matrix_json(lifted.policy);
    doc["residuals"] = {{"affine", sol.affine_residual}, {"bellman", sol.bellman_residual}};
    doc["closed_loop_radius"] = spectral_radius(sol.policy);
    doc["method"] = sol.iterative ? "iteration" : "direct";
    doc["iterations"] = sol.trace.iterations();
    // The direct solve has no sweeps to report, so the trace comes from the
    // fixed-point engine run on the same equation.
    if (want_trace) trace = solve_desirability_iterative(sol.reduced, cfg).trace;
  }
  return doc;
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return exit_status(e.code());
}

class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  void check(const std::string& name, double value, double tolerance) {
    const bool ok = std::isfinite(value) && value <= tolerance;
    print(name, value, tolerance, ok);
  }

  void info(const std::string& name, double value) {
    char line[128];
    std::snprintf(line, sizeof line, "%-26s %12.4e\n", name.c_str(), value);
    out_ << line;
  }

  void flag(const std::string& name, bool ok) {
    char line[128];
    std::snprintf(line, sizeof line, "%-26s %12s %14s  %s\n", name.c_str(),
                  ok ? "yes" : "no", "", ok ? "ok" : "FAIL");
    out_ << line;
    passed_ = passed_ && ok;
  }

  [[nodiscard]] bool passed() const { return passed_; }

 private:
  void print(const std::string& name, double value, double tolerance, bool ok) {
    char line[128];
    std::snprintf(line, sizeof line, "%-26s %12.4e <= %10.1e  %s\n", name.c_str(), value,
                  tolerance, ok ? "ok" : "FAIL");
    out_ << line;
    passed_ = passed_ && ok;
  }

  std::ostream& out_;
  bool passed_ = true;
};

void verify_ssp(const SspProblem& p, const VerifyOptions& options, const SolveConfig& cfg,
                Report& report) {
  const auto sol = solve_ssp(p, cfg);
  const Eigen::VectorXd oracle = oracle::ssp_value_iteration(p, kOracleSweeps);
  const double scale = std::max(1.0, sol.lambda.cwiseAbs().maxCoeff());
  report.check("gap(solver, dense VI)", sup_gap(sol.lambda, oracle), 1e-8 * scale);
  report.check("stationarity", sol.stationarity, 10 * cfg.tol * scale);
  report.check("closed-loop radius", sol.closed_loop_radius, 1.0 - 1e-15);
  report.check("best random improvement",
               std::max(0.0, oracle::ssp_best_improvement(p, sol.lambda, kPerturbations,
                                                          options.seed)),
               1e-8 * scale);
}

void verify_ssp_graph(const SspGraph& g, const VerifyOptions& options,
                      const SolveConfig& cfg, Report& report) {
  const auto compiled = compile(g);
  verify_ssp(compiled.problem, options, cfg, report);
  if (g.is_deterministic()) {
    const auto sol = solve_ssp(compiled.problem, cfg);
    report.check("gap(solver, Dijkstra)",
                 sup_gap(values_by_node(compiled, sol.lambda), oracle::dijkstra(g)), 1e-10);
  }
}

void verify_lqr(const LqrProblem& p, const VerifyOptions& options, const SolveConfig& cfg,
                Report& report) {
  const auto sol = solve_lqr(p, cfg);
  const Eigen::MatrixXd dare = oracle::naive_dare(p, 1e-14);
  report.check("gap(Cholesky, naive DARE)", sup_gap(sol.lambda, dare), 1e-9);
  report.check("Riccati residual", sol.riccati_residual, 1e-9);
  report.check("closed-loop radius", sol.closed_loop_radius, 1.0 - 1e-15);
  report.check("best random improvement",
               std::max(0.0, oracle::lqr_best_improvement(p, sol.lambda, sol.gain,
                                                          kPerturbations, options.seed)),
               1e-8);
}

void verify_ldp(const LdpProblem& p, const VerifyOptions& options, const SolveConfig& cfg,
                Report& report) {
  const auto sol = solve_ldp(p, cfg);
  const Eigen::VectorXd oracle = oracle::ldp_logsumexp_vi(sol.reduced, kOracleSweeps);
  report.check("gap(direct, log-sum-exp VI)", sup_gap(sol.lambda, oracle), 1e-8);
  report.check("affine residual", sol.affine_residual, 1e-12);
  report.check("Bellman residual", sol.bellman_residual, 1e-9);
  if (options.trials == 0 || sol.reduced.size() == 0) return;
  const auto stats = oracle::ldp_rollout(sol.reduced, sol.policy, 0, kRolloutHorizon,
                                         options.trials, options.seed);
  report.info("rollout mean (state 0)", stats.mean_cost);
  report.info("rollout std error", stats.std_error);
  report.check("rollout |mean - lambda|/SE",
               stats.std_error > 0.0
                   ? std::abs(stats.mean_cost - sol.lambda(0)) / stats.std_error
                   : (std::abs(stats.mean_cost - sol.lambda(0)) < 1e-9 ? 0.0 : 1e300),
               3.0);
  report.check("rollout truncated fraction", stats.truncated_fraction, 1e-3);
}

std::vector<Eigen::Index> parse_sizes(const std::string& text) {
  std::vector<Eigen::Index> sizes;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (item.empty() || item.size() > 7 ||
        item.find_first_not_of("0123456789") != std::string::npos) {
      throw Error(ErrorCode::kInvalidConfig, "invalid size \"" + item + "\" in --sizes");
    }
    const long value = std::stol(item);
    if (value < 1) throw Error(ErrorCode::kInvalidConfig, "sizes must be positive");
    sizes.push_back(value);
  }
  if (sizes.empty() || (!text.empty() && text.back() == ',')) {
    throw Error(ErrorCode::kInvalidConfig, "--sizes needs a comma-separated list");
  }
  return sizes;
}

}  // namespace

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDiverged:
    case ErrorCode::kMaxIterExceeded:
    case ErrorCode::kSingularSystem:
    case ErrorCode::kUnstableGain:
    case ErrorCode::kInvarianceViolated:
      return kExitDiverged;
    case ErrorCode::kCertificationFailed:
      return kExitVerificationFailed;
    default:
      return kExitInvalidInput;
  }
}

int run_solve(const SolveOptions& options, std::ostream& out, std::ostream& err) {
  try {
    options.config.validate();
    const auto problem = io::load_problem(options.input);
    spdlog::info("solving {} problem from {}", io::problem_type(problem),
                 options.input.string());
    ConvergenceTrace trace;
    const json doc = solution_json(problem, options.config, options.trace, trace);
    spdlog::info("converged after {} sweeps", doc["iterations"].get<std::size_t>());

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    const auto solution_path = options.out_dir / "solution.json";
    std::ofstream solution(solution_path, std::ios::binary);
    if (!solution) {
      err << "error: cannot write " << solution_path.string() << '\n';
      return kExitInvalidInput;
    }
    solution << io::dump(doc);
    if (options.trace) {
      std::ofstream csv(options.out_dir / "trace.csv", std::ios::binary);
      io::write_trace_csv(csv, trace);
    }
    out << solution_path.string() << '\n';
    return kExitSolved;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int run_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto problem = io::load_problem(options.input);
    SolveConfig cfg;
    cfg.tol = kVerifyTol;
    Report report(out);
    out << "verify " << io::problem_type(problem) << ' ' << options.input.string()
        << " seed=" << options.seed << '\n';
    if (const auto* p = std::get_if<SspProblem>(&problem)) {
      verify_ssp(*p, options, cfg, report);
    } else if (const auto* g = std::get_if<SspGraph>(&problem)) {
      verify_ssp_graph(*g, options, cfg, report);
    } else if (const auto* q = std::get_if<LqrProblem>(&problem)) {
      verify_lqr(*q, options, cfg, report);
    } else {
      verify_ldp(std::get<LdpProblem>(problem), options, cfg, report);
    }
    out << (report.passed() ? "PASS" : "FAIL") << '\n';
    return report.passed() ? kExitSolved : kExitVerificationFailed;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int run_bench(const BenchOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto& cls = options.problem_class;
    if (cls != "ssp" && cls != "lqr" && cls != "ldp") {
      throw Error(ErrorCode::kInvalidConfig, "--class must be ssp, lqr or ldp");
    }
    const auto sizes = parse_sizes(options.sizes);
    out << "class,n,iters,wall_ns,residual\n";
    for (const auto n : sizes) {
      std::size_t iters = 0;
      double residual = 0.0;
      std::chrono::steady_clock::duration wall{};
      if (cls == "ssp") {
        const auto graph =
            instances::random_ssp_graph(static_cast<std::size_t>(n), options.seed, false);
        const auto compiled = compile(graph);
        const auto start = std::chrono::steady_clock::now();
        const auto sol = solve_ssp(compiled.problem);
        wall = std::chrono::steady_clock::now() - start;
        iters = sol.trace.iterations();
        residual = sol.stationarity;
      } else if (cls == "lqr") {
        const auto problem = instances::random_lqr(n, std::max<Eigen::Index>(1, (n + 1) / 2),
                                                   options.seed);
        const auto start = std::chrono::steady_clock::now();
        const auto sol = solve_lqr(problem);
        wall = std::chrono::steady_clock::now() - start;
        iters = sol.trace.iterations();
        residual = sol.riccati_residual;
      } else {
        const auto problem = instances::random_ldp(n, options.seed);
        const auto start = std::chrono::steady_clock::now();
        const auto sol = solve_ldp(problem);
        wall = std::chrono::steady_clock::now() - start;
        iters = sol.trace.iterations();
        residual = sol.bellman_residual;
      }
      char line[160];
      std::snprintf(line, sizeof line, "%s,%ld,%zu,%lld,%.17g\n", cls.c_str(),
                    static_cast<long>(n), iters,
                    static_cast<long long>(
                        std::chrono::duration_cast<std::chrono::nanoseconds>(wall).count()),
                    residual);
      out << line;
    }
    return kExitSolved;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

}  // namespace conebellman::cli
