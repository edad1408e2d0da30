#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "conebellman/fixed_point.hpp"

namespace conebellman {

/// Linearly solvable MDP. `passive` is column stochastic: column i holds the
/// uncontrolled transition probabilities out of state i, so passive(j, i) is
/// the probability of moving from i to j. Controlling the chain to a new
/// column pᵢ costs KL(pᵢ ‖ passive column i) per unit of mass in state i, on
/// top of the state cost.
struct LdpProblem {
  Eigen::MatrixXd passive;  // n x n, column stochastic
  Eigen::VectorXd cost;     // n, zero on goals, positive elsewhere
  std::vector<Eigen::Index> goals;

  [[nodiscard]] Eigen::Index num_states() const { return passive.rows(); }
  [[nodiscard]] bool is_goal(Eigen::Index state) const;

  /// Throws kShapeMismatch, kInvalidProblem, kNoGoal, kGoalNotAbsorbing or
  /// kGoalUnreachable.
  void validate() const;
};

/// The chain restricted to non-goal states. Column i of `passive` is
/// substochastic; the missing mass goal_mass(i) flows into the goal set.
struct ReducedLdp {
  Eigen::MatrixXd passive;      // n_r x n_r
  Eigen::VectorXd goal_mass;    // n_r
  Eigen::VectorXd cost;         // n_r, nonnegative
  std::vector<Eigen::Index> states;  // original index of each reduced state

  [[nodiscard]] Eigen::Index size() const { return passive.rows(); }

  /// Column balance, nonnegativity, and that every state can reach goal
  /// mass through the support of `passive`.
  void validate() const;
};

/// Deletes goal rows and columns; goal_mass(i) aggregates the passive
/// probability of jumping from non-goal state i into any goal.
ReducedLdp reduce(const LdpProblem& problem);

struct Desirability {
  Eigen::VectorXd z;       // exp(-λ), in (0, 1]
  Eigen::VectorXd lambda;  // >= 0
  ConvergenceTrace trace;
  double affine_residual = 0.0;  // ‖z - G(P̄ᵀz + p̄_g)‖∞
  double perron_radius = 0.0;    // ρ(G P̄ᵀ)
  bool iterative = false;        // true when the fixed-point fallback ran
};

/// Solves the affine desirability equation z = G(P̄ᵀz + p̄_g),
/// G = diag(exp(-s)), by a direct LU solve of (I - GP̄ᵀ)z = G p̄_g. When the
/// direct solution misses the residual target the Bellman iteration is run
/// instead. Throws kSingularSystem if ρ(GP̄ᵀ) >= 1.
Desirability solve_desirability(const ReducedLdp& reduced, const SolveConfig& cfg = {});

/// Value iteration on the blockwise Bellman equation from λ = 0, which is
/// z ← G(P̄ᵀz + p̄_g) started at z = 1.
Desirability solve_desirability_iterative(const ReducedLdp& reduced,
                                          const SolveConfig& cfg = {},
                                          const IterateObserver& observer = {});

/// ‖z - G(P̄ᵀz + p̄_g)‖∞.
double affine_residual(const ReducedLdp& reduced, const Eigen::VectorXd& z);

/// Closed-form blockwise minimizer: column i is p̄ᵢ ⊙ exp(-λ) normalized by
/// 1ᵀ(p̄ᵢ ⊙ exp(-λ)) + p̄_g(i). Zeros of p̄ᵢ stay exact zeros.
Eigen::MatrixXd optimal_policy(const ReducedLdp& reduced, const Eigen::VectorXd& lambda);

/// h(P) = s + diag(Pᵀ log(P ⊘ P̄)) + π with π the KL term of the implied
/// goal transition, 0·log 0 = 0. Throws kSupportViolation when P puts mass
/// where P̄ has none (including goal mass where p̄_g is zero) and
/// kShapeMismatch / kInvalidProblem for malformed P.
Eigen::VectorXd kl_stage_cost(const ReducedLdp& reduced, const Eigen::MatrixXd& policy);

/// ‖λ - (h(P) + Pᵀλ)‖∞.
double verify_bellman(const ReducedLdp& reduced, const Eigen::VectorXd& lambda,
                      const Eigen::MatrixXd& policy);

/// BlockProblem view: one block per column pᵢ, constant term s.
class LdpBellman {
 public:
  using Minimizer = Eigen::VectorXd;  // pᵢ
  struct Evaluation {
    Eigen::VectorXd lambda;
  };

  explicit LdpBellman(const ReducedLdp& reduced) : reduced_(reduced) {}

  [[nodiscard]] ConeTag cone() const;
  [[nodiscard]] std::size_t num_blocks() const;
  [[nodiscard]] Evaluation evaluate(const ValueObject& lambda) const;
  [[nodiscard]] Eigen::MatrixXd constant_term(const Evaluation& evaluation) const;
  [[nodiscard]] BlockMinimum<Minimizer> minimize_block(std::size_t block,
                                                       const Evaluation& evaluation) const;

 private:
  const ReducedLdp& reduced_;
};

struct LdpSolution {
  ReducedLdp reduced;
  Eigen::VectorXd z;
  Eigen::VectorXd lambda;
  Eigen::MatrixXd policy;  // P*, n_r x n_r
  ConvergenceTrace trace;
  double affine_residual = 0.0;
  double bellman_residual = 0.0;
  double perron_radius = 0.0;
  bool iterative = false;
};

/// validate -> reduce -> solve_desirability -> optimal_policy, certifying
/// the Bellman residual below 10·tol.
LdpSolution solve_ldp(const LdpProblem& problem, const SolveConfig& cfg = {});

}  // namespace conebellman
