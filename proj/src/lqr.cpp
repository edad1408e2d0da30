#include "conebellman/lqr.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "conebellman/linalg.hpp"

namespace conebellman {

namespace {

constexpr double kPivotTol = 1e-14;
constexpr double kLyapunovTol = 1e-12;
constexpr int kMaxDoublings = 64;

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

bool positive_definite(const Eigen::MatrixXd& m) {
  return m.size() == 0 || min_eigenvalue(m) > 0.0;
}

bool positive_semidefinite(const Eigen::MatrixXd& m) {
  return m.size() == 0 || min_eigenvalue(m) >= -kConeTolerance;
}

}  // namespace

void LqrProblem::validate() const {
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  require(n >= 1, ErrorCode::kShapeMismatch, "LQR needs at least one state");
  require(A.cols() == n, ErrorCode::kShapeMismatch, "A is " + shape(A));
  require(B.rows() == n, ErrorCode::kShapeMismatch, "B is " + shape(B));
  require(Q.rows() == n && Q.cols() == n, ErrorCode::kShapeMismatch, "Q is " + shape(Q));
  require(R.rows() == m && R.cols() == m, ErrorCode::kShapeMismatch, "R is " + shape(R));
  require(A.allFinite() && B.allFinite() && Q.allFinite() && R.allFinite(),
          ErrorCode::kInvalidProblem, "non-finite problem data");
  require(is_symmetric(Q, kSymmetryTolerance), ErrorCode::kInvalidProblem,
          "Q must be symmetric");
  require(is_symmetric(R, kSymmetryTolerance), ErrorCode::kInvalidProblem,
          "R must be symmetric");
  const bool q_pd = positive_definite(Q);
  const bool r_pd = positive_definite(R);
  require((q_pd && positive_semidefinite(R)) || (positive_semidefinite(Q) && r_pd),
          ErrorCode::kInvalidProblem,
          "need Q positive definite with R semidefinite, or Q semidefinite with R "
          "positive definite");
}

std::vector<std::string> LqrProblem::intake_warnings() const {
  std::vector<std::string> out;
  if (!positive_definite(Q)) {
    out.emplace_back(
        "Q is only positive semidefinite; the value matrix is positive definite only "
        "if every unpenalized mode is driven by the optimal gain");
  }
  return out;
}

Eigen::MatrixXd cholesky_factor(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols()) {
    throw Error(ErrorCode::kNonSquare, "cholesky_factor of a " + shape(S) + " matrix");
  }
  if (!is_symmetric(S, kSymmetryTolerance)) {
    throw Error(ErrorCode::kNotPositiveDefinite, "matrix is not symmetric");
  }
  const Eigen::Index n = S.rows();
  const double threshold = kPivotTol * inf_norm(S);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    // Column j only reads the already finished columns 0..j-1.
    double pivot = S(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (!(pivot > threshold)) {
      throw Error(ErrorCode::kNotPositiveDefinite,
                  "pivot " + std::to_string(pivot) + " at column " + std::to_string(j));
    }
    const double diag = std::sqrt(pivot);
    L(j, j) = diag;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double sum = S(i, j);
      for (Eigen::Index k = 0; k < j; ++k) sum -= L(i, k) * L(j, k);
      L(i, j) = sum / diag;
    }
  }
  return L;
}

Eigen::MatrixXd forward_substitute(const Eigen::MatrixXd& L, const Eigen::MatrixXd& rhs) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n || rhs.rows() != n) {
    throw Error(ErrorCode::kShapeMismatch, "forward_substitute shape mismatch");
  }
  Eigen::MatrixXd x = rhs;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double sum = x(i, c);
      for (Eigen::Index k = 0; k < i; ++k) sum -= L(i, k) * x(k, c);
      x(i, c) = sum / L(i, i);
    }
  }
  return x;
}

Eigen::MatrixXd back_substitute_transposed(const Eigen::MatrixXd& L,
                                           const Eigen::MatrixXd& rhs) {
  const Eigen::Index n = L.rows();
  if (L.cols() != n || rhs.rows() != n) {
    throw Error(ErrorCode::kShapeMismatch, "back_substitute_transposed shape mismatch");
  }
  Eigen::MatrixXd x = rhs;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double sum = x(i, c);
      // (Lᵀ)(i, k) = L(k, i)
      for (Eigen::Index k = i + 1; k < n; ++k) sum -= L(k, i) * x(k, c);
      x(i, c) = sum / L(i, i);
    }
  }
  return x;
}

RiccatiStep riccati_step(const LqrProblem& problem, const Eigen::MatrixXd& lambda) {
  const auto& A = problem.A;
  const auto& B = problem.B;
  if (lambda.rows() != A.rows() || lambda.cols() != A.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "lambda is " + shape(lambda));
  }
  const Eigen::MatrixXd lambda_b = lambda * B;
  RiccatiStep step;
  step.factor = cholesky_factor(symmetrize(problem.R + B.transpose() * lambda_b));
  step.projected = forward_substitute(step.factor, lambda_b.transpose() * A);
  step.value = problem.Q + A.transpose() * lambda * A;
  // Rank-one block minima, summed in ascending row order.
  for (Eigen::Index i = 0; i < step.projected.rows(); ++i) {
    const Eigen::VectorXd row = step.projected.row(i).transpose();
    step.value.noalias() -= row * row.transpose();
  }
  step.value = symmetrize(step.value);
  step.gain = -back_substitute_transposed(step.factor, step.projected);
  return step;
}

ConeTag LqrBellman::cone() const { return ConeTag::psd(problem_.num_states()); }

std::size_t LqrBellman::num_blocks() const {
  return static_cast<std::size_t>(problem_.num_inputs());
}

LqrBellman::Evaluation LqrBellman::evaluate(const ValueObject& lambda) const {
  const auto& A = problem_.A;
  const auto& B = problem_.B;
  const Eigen::MatrixXd& value = lambda.data();
  const Eigen::MatrixXd lambda_b = value * B;
  const Eigen::MatrixXd factor =
      cholesky_factor(symmetrize(problem_.R + B.transpose() * lambda_b));
  return {problem_.Q + A.transpose() * value * A,
          forward_substitute(factor, lambda_b.transpose() * A)};
}

Eigen::MatrixXd LqrBellman::constant_term(const Evaluation& evaluation) const {
  return evaluation.constant;
}

BlockMinimum<LqrBellman::Minimizer> LqrBellman::minimize_block(
    std::size_t block, const Evaluation& evaluation) const {
  const Eigen::VectorXd row =
      evaluation.projected.row(static_cast<Eigen::Index>(block)).transpose();
  // k̂ᵢk̂ᵢᵀ + mᵢk̂ᵢᵀ + k̂ᵢmᵢᵀ = (k̂ᵢ + mᵢ)(k̂ᵢ + mᵢ)ᵀ - mᵢmᵢᵀ ⪰ -mᵢmᵢᵀ
  return {-row * row.transpose(), -row};
}

double riccati_residual(const LqrProblem& problem, const Eigen::MatrixXd& lambda) {
  const auto& A = problem.A;
  const auto& B = problem.B;
  const Eigen::MatrixXd inner = problem.R + B.transpose() * lambda * B;
  const Eigen::MatrixXd cross = B.transpose() * lambda * A;
  Eigen::MatrixXd rhs = problem.Q + A.transpose() * lambda * A;
  if (cross.size() > 0) {
    const Eigen::LLT<Eigen::MatrixXd> llt(inner);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kNotPositiveDefinite, "R + BᵀλB is not positive definite");
    }
    rhs -= cross.transpose() * llt.solve(cross);
  }
  return sup_norm(lambda - rhs);
}

LqrSolution solve_lqr(const LqrProblem& problem, const SolveConfig& cfg,
                      const IterateObserver& observer) {
  problem.validate();
  const LqrBellman bellman(problem);
  const auto initial = ValueObject::psd(problem.Q);

  Eigen::MatrixXd last = problem.Q;
  const IterateObserver track = [&](std::size_t k, const ValueObject& iterate) {
    last = iterate.data();
    if (observer) observer(k, iterate);
  };

  std::optional<FixedPointResult<LqrBellman>> result;
  try {
    result.emplace(fixed_point_solve(bellman, initial, cfg, track));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMaxIterExceeded) throw;
    const auto greedy = riccati_step(problem, last);
    const double radius = spectral_radius(problem.A + problem.B * greedy.gain);
    if (radius >= 1.0) {
      throw Error(ErrorCode::kDiverged, std::string(e.what()) +
                                            "; greedy closed loop has spectral radius " +
                                            std::to_string(radius) + " >= 1");
    }
    throw;
  }

  LqrSolution solution;
  solution.lambda = result->value.data();
  solution.trace = std::move(result->trace);
  solution.stationarity = result->stationarity;
  solution.warnings = problem.intake_warnings();
  solution.gain = riccati_step(problem, solution.lambda).gain;

  if (!(min_eigenvalue(solution.lambda) > 0.0)) {
    throw Error(ErrorCode::kCertificationFailed, "value matrix is not positive definite");
  }
  solution.closed_loop_radius = spectral_radius(problem.A + problem.B * solution.gain);
  if (solution.closed_loop_radius >= 1.0) {
    throw Error(ErrorCode::kDiverged, "closed loop spectral radius " +
                                          std::to_string(solution.closed_loop_radius) +
                                          " >= 1");
  }
  solution.riccati_residual = riccati_residual(problem, solution.lambda);
  if (!(solution.riccati_residual < 10.0 * cfg.tol)) {
    throw Error(ErrorCode::kCertificationFailed,
                "Riccati residual " + std::to_string(solution.riccati_residual) +
                    " exceeds 10·tol");
  }
  return solution;
}

Eigen::MatrixXd gain_value(const LqrProblem& problem, const Eigen::MatrixXd& gain) {
  if (gain.rows() != problem.num_inputs() || gain.cols() != problem.num_states()) {
    throw Error(ErrorCode::kShapeMismatch, "gain is " + shape(gain));
  }
  Eigen::MatrixXd transition = problem.A + problem.B * gain;
  const double radius = spectral_radius(transition);
  if (radius >= 1.0) {
    throw Error(ErrorCode::kUnstableGain,
                "closed loop spectral radius " + std::to_string(radius) + " >= 1");
  }
  // Doubling: after k rounds `value` sums the first 2^k terms of
  // Σ (Φᵀ)^t W Φ^t.
  Eigen::MatrixXd value = problem.Q + gain.transpose() * problem.R * gain;
  for (int round = 0; round < kMaxDoublings; ++round) {
    const Eigen::MatrixXd increment = transition.transpose() * value * transition;
    value += increment;
    if (sup_norm(increment) <= kLyapunovTol * std::max(1.0, sup_norm(value))) break;
    transition = transition * transition;
  }
  return symmetrize(value);
}

double cost_of_gain(const LqrProblem& problem, const Eigen::MatrixXd& gain,
                    const Eigen::MatrixXd& x0) {
  if (x0.rows() != problem.num_states() || x0.cols() != problem.num_states()) {
    throw Error(ErrorCode::kShapeMismatch, "x0 is " + shape(x0));
  }
  const auto start = ValueObject::psd(x0);
  if (!start.in_cone()) {
    throw Error(ErrorCode::kNotInCone, "x0 must be positive semidefinite");
  }
  return gain_value(problem, gain).cwiseProduct(start.data()).sum();
}

}  // namespace conebellman
