#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "conebellman/fixed_point.hpp"

namespace conebellman {

/// Stochastic shortest path in positive-system form:
///
///   minimize   Σₜ sᵀx(t) + rᵀu(t)
///   subject to x(t+1) = A x(t) + B u(t),  u(t) >= 0,
///              1ᵀuᵢ(t) <= Eᵢᵀ x(t)  for every input block i.
///
/// Inputs are partitioned into n consecutive blocks, block i holding
/// block_sizes[i] (possibly zero) columns of B. Row i of E is the budget of
/// block i.
struct SspProblem {
  Eigen::MatrixXd A;  // n x n, nonnegative
  Eigen::MatrixXd B;  // n x m
  Eigen::VectorXd s;  // n, strictly positive state cost
  Eigen::VectorXd r;  // m, nonnegative input cost
  std::vector<Eigen::Index> block_sizes;
  Eigen::MatrixXd E;  // n x n, nonnegative

  [[nodiscard]] Eigen::Index num_states() const { return A.rows(); }
  [[nodiscard]] Eigen::Index num_inputs() const { return B.cols(); }
  /// First input column of each block.
  [[nodiscard]] std::vector<Eigen::Index> block_offsets() const;

  /// Throws kShapeMismatch or kInvalidProblem.
  void validate() const;
};

/// The n x m matrix summing each block's inputs (C with CK <= E).
Eigen::MatrixXd block_sum_matrix(const SspProblem& problem);

/// K >= 0 and E - CK >= 0 (up to 1e-12 relative slack). Throws
/// kShapeMismatch when K is not m x n.
bool validate_gain(const SspProblem& problem, const Eigen::MatrixXd& gain);

struct SspUpdate {
  Eigen::VectorXd value;
  Eigen::MatrixXd gain;  // m x n
};

/// One Bellman sweep λ' = s + Aᵀλ + Σᵢ min_{Kᵢ} Kᵢᵀ(rᵢ + Bᵢᵀλ).
///
/// The minimum over each block's polytope sits at a vertex: for column j it
/// spends the whole budget E(i, j) on the cheapest input of the block when
/// that reduced cost is negative (lowest index on ties) and does nothing
/// otherwise. Throws kNegativeLambda if λ has a negative entry.
SspUpdate bellman_update(const SspProblem& problem, const Eigen::VectorXd& lambda);

/// BlockProblem view of the SSP Bellman equation: one block per input block,
/// constant term s + Aᵀλ.
class SspBellman {
 public:
  using Minimizer = Eigen::MatrixXd;  // the block's rows of K
  struct Evaluation {
    Eigen::VectorXd lambda;
  };

  explicit SspBellman(const SspProblem& problem);

  [[nodiscard]] ConeTag cone() const;
  [[nodiscard]] std::size_t num_blocks() const;
  [[nodiscard]] Evaluation evaluate(const ValueObject& lambda) const;
  [[nodiscard]] Eigen::MatrixXd constant_term(const Evaluation& evaluation) const;
  [[nodiscard]] BlockMinimum<Minimizer> minimize_block(
      std::size_t block, const Evaluation& evaluation) const;

  /// Stacks per-block minimizers into the m x n gain.
  [[nodiscard]] Eigen::MatrixXd assemble_gain(
      const std::vector<Minimizer>& minimizers) const;

 private:
  const SspProblem& problem_;
  std::vector<Eigen::Index> offsets_;
};

struct SspSolution {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd gain;
  ConvergenceTrace trace;
  double stationarity = 0.0;
  double closed_loop_radius = 0.0;  // ρ(A + BK)
};

/// Value iteration from λ = 0 through the block engine. The result is
/// certified: K feasible, A + BK >= 0 (else kInvarianceViolated) and
/// ρ(A + BK) < 1 (else kDiverged). A run that exhausts max_iter with an
/// unstable greedy closed loop is reported as kDiverged as well.
SspSolution solve_ssp(const SspProblem& problem, const SolveConfig& cfg = {},
                      const IterateObserver& observer = {});

}  // namespace conebellman
