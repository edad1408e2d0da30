#pragma once

// Brute-force references. None of these routines call into the solver
// modules' numerical paths: they re-derive each Bellman equation densely and
// use different factorizations, so agreement is evidence rather than an echo.

#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "conebellman/ldp.hpp"
#include "conebellman/lqr.hpp"
#include "conebellman/ssp.hpp"
#include "conebellman/ssp_graph.hpp"

namespace conebellman::oracle {

/// Synchronous value iteration from λ = 0. Each block's polytope minimum is
/// found by enumerating its vertices (the zero column and one per input).
/// Stops when a sweep changes λ by at most tol·max(1, ‖λ‖∞) or after
/// `iterations` sweeps.
Eigen::VectorXd ssp_value_iteration(const SspProblem& problem, std::size_t iterations,
                                    double tol = 1e-15);

/// Shortest distances from every node to the goal set, each step costing the
/// edge cost plus s at the departing node. Requires a deterministic graph;
/// throws kUnreachableNode when some node cannot reach a goal.
Eigen::VectorXd dijkstra(const SspGraph& graph);

/// λ ← Q + AᵀλA - AᵀλB (R + BᵀλB)⁻¹ BᵀλA from λ = Q with a Gauss-Jordan
/// inverse, until a sweep moves λ by at most tol·max(1, ‖λ‖∞). Throws
/// kSingularInnerMatrix, kDiverged (‖λ‖ > 1e12) or
/// kMaxIterExceeded.
Eigen::MatrixXd naive_dare(const LqrProblem& problem, double tol,
                           std::size_t max_iter = 1000000);

/// Gauss-Jordan inverse with partial pivoting; kSingularInnerMatrix on a
/// vanishing pivot.
Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& m);

/// λ ← s - log(P̄ᵀexp(-λ) + p̄_g) in log space with max-shifted log-sum-exp,
/// from λ = 0, until a sweep moves λ by at most tol or `iterations` sweeps.
Eigen::VectorXd ldp_logsumexp_vi(const ReducedLdp& reduced, std::size_t iterations,
                                 double tol = 1e-15);

/// Value of a fixed SSP gain: v solving v = s + Kᵀr + (A + BK)ᵀv, by a
/// dense LU solve. Entries are +inf when ρ(A + BK) >= 1.
Eigen::VectorXd ssp_gain_value(const SspProblem& problem, const Eigen::MatrixXd& gain);

/// Draws `count` random feasible gains (each block column spends a random
/// share of its budget spread over the block's inputs) and returns the
/// largest amount by which any of them beats λ in some entry. A value <= 0
/// means no sample did better. Unstable samples are skipped.
double ssp_best_improvement(const SspProblem& problem, const Eigen::VectorXd& lambda,
                            std::size_t count, std::uint64_t seed);

/// Closed-loop cost matrix of gain K from the vectorized Lyapunov equation
/// (I - Φᵀ⊗Φᵀ) vec(λ_K) = vec(Q + KᵀRK), Φ = A + BK, solved densely.
Eigen::MatrixXd lqr_gain_value(const LqrProblem& problem, const Eigen::MatrixXd& gain);

/// Perturbs `gain` `count` times with Gaussian noise of random scale in
/// [1e-4, 1e-1], keeps stabilizing samples, and returns the largest
/// yᵀλy - yᵀλ_K y over them and a random unit y per sample.
double lqr_best_improvement(const LqrProblem& problem, const Eigen::MatrixXd& lambda,
                            const Eigen::MatrixXd& gain, std::size_t count,
                            std::uint64_t seed);

struct RolloutStats {
  std::size_t trials = 0;
  double mean_cost = 0.0;
  double std_error = 0.0;
  std::size_t horizon = 0;
  double truncated_fraction = 0.0;
};

/// Monte Carlo cost of running `policy` from `start`. Each step in state i
/// costs s_i + KL(pᵢ ‖ p̄ᵢ) with both columns extended by their goal mass;
/// a trajectory ends when it jumps to the goal set or after `horizon` steps.
/// Trial t draws from std::mt19937_64 seeded with seed + t. Throws
/// kBadSeedConfig for zero trials or horizon.
RolloutStats ldp_rollout(const ReducedLdp& reduced, const Eigen::MatrixXd& policy,
                         Eigen::Index start, std::size_t horizon, std::size_t trials,
                         std::uint64_t seed);

}  // namespace conebellman::oracle
