#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conebellman/fixed_point.hpp"

namespace conebellman {

/// Discrete-time LQR: y(t+1) = A y + B u, u = K y, stage cost
/// yᵀ(Q + KᵀRK)y. Lifted to x = yyᵀ the value is ⟨λ, x⟩ with λ on the
/// semidefinite cone.
struct LqrProblem {
  Eigen::MatrixXd A;  // n x n
  Eigen::MatrixXd B;  // n x m
  Eigen::MatrixXd Q;  // n x n symmetric
  Eigen::MatrixXd R;  // m x m symmetric

  [[nodiscard]] Eigen::Index num_states() const { return A.rows(); }
  [[nodiscard]] Eigen::Index num_inputs() const { return B.cols(); }

  /// Shapes, symmetry, and the intake condition: Q ≻ 0 with R ⪰ 0, or
  /// Q ⪰ 0 with R ≻ 0. Throws kShapeMismatch / kInvalidProblem.
  void validate() const;
  /// Non-fatal intake findings (currently: Q only semidefinite).
  [[nodiscard]] std::vector<std::string> intake_warnings() const;
};

/// Lower-triangular L with LLᵀ = S and a positive diagonal, by the
/// left-looking column algorithm. A pivot <= 1e-14·‖S‖∞ raises
/// kNotPositiveDefinite.
Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& S);

/// Solves L X = rhs for lower-triangular L.
Eigen::MatrixXd forward_substitute(const Eigen::MatrixXd& L, const Eigen::MatrixXd& rhs);

/// Solves Lᵀ X = rhs for lower-triangular L.
Eigen::MatrixXd back_substitute_transposed(const Eigen::MatrixXd& L,
                                           const Eigen::MatrixXd& rhs);

struct RiccatiStep {
  Eigen::MatrixXd value;      // Q + AᵀλA - MᵀM, symmetrized
  Eigen::MatrixXd gain;       // K = -L⁻ᵀM
  Eigen::MatrixXd factor;     // L, with LLᵀ = R + BᵀλB
  Eigen::MatrixXd projected;  // M = L⁻¹BᵀλA; row i is mᵢ
};

/// One decomposed Riccati step. With K̂ = LᵀK the gain-dependent part of the
/// Bellman operator splits into m rank-one terms k̂ᵢk̂ᵢᵀ + mᵢk̂ᵢᵀ + k̂ᵢmᵢᵀ,
/// each minimized by k̂ᵢ = -mᵢ with value -mᵢmᵢᵀ.
RiccatiStep riccati_step(const LqrProblem& problem, const Eigen::MatrixXd& lambda);

/// BlockProblem view: one block per row of K̂, constant term Q + AᵀλA.
class LqrBellman {
 public:
  using Minimizer = Eigen::VectorXd;  // k̂ᵢ
  struct Evaluation {
    Eigen::MatrixXd constant;
    Eigen::MatrixXd projected;
  };

  explicit LqrBellman(const LqrProblem& problem) : problem_(problem) {}

  [[nodiscard]] ConeTag cone() const;
  [[nodiscard]] std::size_t num_blocks() const;
  [[nodiscard]] Evaluation evaluate(const ValueObject& lambda) const;
  [[nodiscard]] Eigen::MatrixXd constant_term(const Evaluation& evaluation) const;
  [[nodiscard]] BlockMinimum<Minimizer> minimize_block(std::size_t block,
                                                       const Evaluation& evaluation) const;

 private:
  const LqrProblem& problem_;
};

/// ‖λ - (Q + AᵀλA - AᵀλB(R + BᵀλB)⁻¹BᵀλA)‖∞, evaluated with a library
/// factorization independent of riccati_step.
double riccati_residual(const LqrProblem& problem, const Eigen::MatrixXd& lambda);

struct LqrSolution {
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd gain;
  ConvergenceTrace trace;
  double stationarity = 0.0;
  double riccati_residual = 0.0;
  double closed_loop_radius = 0.0;
  std::vector<std::string> warnings;
};

/// Iterates riccati_step from λ = Q. Certifies λ ≻ 0, ρ(A + BK) < 1 and a
/// Riccati residual below 10·tol. Unstabilizable systems surface as
/// kDiverged.
LqrSolution solve_lqr(const LqrProblem& problem, const SolveConfig& cfg = {},
                      const IterateObserver& observer = {});

/// Closed-loop cost matrix λ_K solving λ_K = Q + KᵀRK + (A+BK)ᵀλ_K(A+BK).
/// Throws kUnstableGain when ρ(A + BK) >= 1.
Eigen::MatrixXd gain_value(const LqrProblem& problem, const Eigen::MatrixXd& gain);

/// ⟨λ_K, x0⟩: the infinite-horizon cost of gain K from the lifted initial
/// state x0 (yyᵀ for a vector start).
double cost_of_gain(const LqrProblem& problem, const Eigen::MatrixXd& gain,
                    const Eigen::MatrixXd& x0);

}  // namespace conebellman
