#include "conebellman/ssp.hpp"

#include <numeric>
#include <string>

#include "conebellman/linalg.hpp"

namespace conebellman {

namespace {

constexpr double kFeasibilitySlack = 1e-12;

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

bool nonnegative(const Eigen::MatrixXd& m) { return m.size() == 0 || m.minCoeff() >= 0.0; }

// Cheapest input of block `block` at λ, written into the block's gain rows.
// Returns the contribution Kᵢᵀcᵢ.
Eigen::VectorXd block_minimum(const SspProblem& p, Eigen::Index offset,
                              Eigen::Index block, const Eigen::VectorXd& lambda,
                              Eigen::Ref<Eigen::MatrixXd> gain_rows) {
  const Eigen::Index n = p.num_states();
  const Eigen::Index size = p.block_sizes[static_cast<std::size_t>(block)];
  gain_rows.setZero();
  Eigen::VectorXd contribution = Eigen::VectorXd::Zero(n);
  if (size == 0) return contribution;

  const Eigen::VectorXd reduced =
      p.r.segment(offset, size) + p.B.middleCols(offset, size).transpose() * lambda;
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < size; ++a) {
    if (reduced(a) < reduced(best)) best = a;
  }
  // Zero reduced cost keeps the zero column: no action is the sparsest choice.
  if (reduced(best) < 0.0) {
    gain_rows.row(best) = p.E.row(block);
    contribution = reduced(best) * p.E.row(block).transpose();
  }
  return contribution;
}

}  // namespace

std::vector<Eigen::Index> SspProblem::block_offsets() const {
  std::vector<Eigen::Index> offsets(block_sizes.size(), 0);
  for (std::size_t i = 1; i < block_sizes.size(); ++i) {
    offsets[i] = offsets[i - 1] + block_sizes[i - 1];
  }
  return offsets;
}

void SspProblem::validate() const {
  const Eigen::Index n = A.rows();
  require(n >= 1, ErrorCode::kShapeMismatch, "SSP needs at least one state");
  require(A.cols() == n, ErrorCode::kShapeMismatch, "A is " + shape(A));
  require(B.rows() == n, ErrorCode::kShapeMismatch, "B is " + shape(B));
  require(s.size() == n, ErrorCode::kShapeMismatch, "s has wrong length");
  require(r.size() == B.cols(), ErrorCode::kShapeMismatch, "r has wrong length");
  require(E.rows() == n && E.cols() == n, ErrorCode::kShapeMismatch, "E is " + shape(E));
  require(static_cast<Eigen::Index>(block_sizes.size()) == n, ErrorCode::kShapeMismatch,
          "need one block size per state");
  Eigen::Index total = 0;
  for (const auto size : block_sizes) {
    require(size >= 0, ErrorCode::kInvalidProblem, "negative block size");
    total += size;
  }
  require(total == B.cols(), ErrorCode::kShapeMismatch,
          "block sizes sum to " + std::to_string(total) + " but B has " +
              std::to_string(B.cols()) + " columns");
  require(A.allFinite() && B.allFinite() && s.allFinite() && r.allFinite() &&
              E.allFinite(),
          ErrorCode::kInvalidProblem, "non-finite problem data");
  require(s.minCoeff() > 0.0, ErrorCode::kInvalidProblem, "s must be strictly positive");
  require(nonnegative(r), ErrorCode::kInvalidProblem, "r must be nonnegative");
  require(nonnegative(A), ErrorCode::kInvalidProblem, "A must be nonnegative");
  require(nonnegative(E), ErrorCode::kInvalidProblem, "E must be nonnegative");
}

Eigen::MatrixXd block_sum_matrix(const SspProblem& problem) {
  const auto offsets = problem.block_offsets();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(problem.num_states(), problem.num_inputs());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    c.row(static_cast<Eigen::Index>(i))
        .segment(offsets[i], problem.block_sizes[i])
        .setOnes();
  }
  return c;
}

bool validate_gain(const SspProblem& problem, const Eigen::MatrixXd& gain) {
  if (gain.rows() != problem.num_inputs() || gain.cols() != problem.num_states()) {
    throw Error(ErrorCode::kShapeMismatch,
                "gain is " + shape(gain) + ", expected " +
                    std::to_string(problem.num_inputs()) + "x" +
                    std::to_string(problem.num_states()));
  }
  const double slack = kFeasibilitySlack * std::max(1.0, sup_norm(problem.E));
  if (gain.size() > 0 && gain.minCoeff() < -slack) return false;
  const Eigen::MatrixXd budget = problem.E - block_sum_matrix(problem) * gain;
  return budget.minCoeff() >= -slack;
}

SspUpdate bellman_update(const SspProblem& problem, const Eigen::VectorXd& lambda) {
  problem.validate();
  if (lambda.size() != problem.num_states()) {
    throw Error(ErrorCode::kShapeMismatch, "lambda has wrong length");
  }
  if (lambda.minCoeff() < 0.0) {
    throw Error(ErrorCode::kNegativeLambda, "lambda must be nonnegative");
  }
  const auto offsets = problem.block_offsets();
  SspUpdate out{problem.s + problem.A.transpose() * lambda,
                Eigen::MatrixXd::Zero(problem.num_inputs(), problem.num_states())};
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    out.value += block_minimum(problem, offsets[i], static_cast<Eigen::Index>(i), lambda,
                               out.gain.middleRows(offsets[i], problem.block_sizes[i]));
  }
  return out;
}

SspBellman::SspBellman(const SspProblem& problem)
    : problem_(problem), offsets_(problem.block_offsets()) {}

ConeTag SspBellman::cone() const { return ConeTag::orthant(problem_.num_states()); }

std::size_t SspBellman::num_blocks() const { return offsets_.size(); }

SspBellman::Evaluation SspBellman::evaluate(const ValueObject& lambda) const {
  return {lambda.vector()};
}

Eigen::MatrixXd SspBellman::constant_term(const Evaluation& evaluation) const {
  return problem_.s + problem_.A.transpose() * evaluation.lambda;
}

BlockMinimum<SspBellman::Minimizer> SspBellman::minimize_block(
    std::size_t block, const Evaluation& evaluation) const {
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(problem_.block_sizes[block],
                                               problem_.num_states());
  Eigen::VectorXd contribution =
      block_minimum(problem_, offsets_[block], static_cast<Eigen::Index>(block),
                    evaluation.lambda, rows);
  return {Eigen::MatrixXd(std::move(contribution)), std::move(rows)};
}

Eigen::MatrixXd SspBellman::assemble_gain(const std::vector<Minimizer>& minimizers) const {
  Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(problem_.num_inputs(), problem_.num_states());
  for (std::size_t i = 0; i < minimizers.size(); ++i) {
    gain.middleRows(offsets_[i], problem_.block_sizes[i]) = minimizers[i];
  }
  return gain;
}

SspSolution solve_ssp(const SspProblem& problem, const SolveConfig& cfg,
                      const IterateObserver& observer) {
  problem.validate();
  const SspBellman bellman(problem);
  const auto zero = ValueObject::zero(bellman.cone());

  Eigen::VectorXd last = Eigen::VectorXd::Zero(problem.num_states());
  const IterateObserver track = [&](std::size_t k, const ValueObject& iterate) {
    last = iterate.vector();
    if (observer) observer(k, iterate);
  };

  std::optional<FixedPointResult<SspBellman>> result;
  try {
    result.emplace(fixed_point_solve(bellman, zero, cfg, track));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMaxIterExceeded) throw;
    const auto greedy = bellman_update(problem, last);
    const double radius = spectral_radius(problem.A + problem.B * greedy.gain);
    if (radius >= 1.0) {
      throw Error(ErrorCode::kDiverged,
                  std::string(e.what()) + "; greedy closed loop has spectral radius " +
                      std::to_string(radius) + " >= 1, no finite cost");
    }
    throw;
  }

  SspSolution solution{result->value.vector(), bellman.assemble_gain(result->minimizers),
                       std::move(result->trace), result->stationarity, 0.0};
  if (!validate_gain(problem, solution.gain)) {
    throw Error(ErrorCode::kCertificationFailed, "optimal gain violates the input budget");
  }
  const Eigen::MatrixXd closed_loop = problem.A + problem.B * solution.gain;
  if (closed_loop.minCoeff() < -kFeasibilitySlack * std::max(1.0, sup_norm(closed_loop))) {
    throw Error(ErrorCode::kInvarianceViolated,
                "A + BK has negative entries; E does not keep the orthant invariant");
  }
  solution.closed_loop_radius = spectral_radius(closed_loop);
  if (solution.closed_loop_radius >= 1.0) {
    throw Error(ErrorCode::kDiverged,
                "closed loop spectral radius " + std::to_string(solution.closed_loop_radius) +
                    " >= 1");
  }
  return solution;
}

}  // namespace conebellman
