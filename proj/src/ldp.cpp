#include "conebellman/ldp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "conebellman/linalg.hpp"

namespace conebellman {

namespace {

constexpr double kBalanceTol = 1e-12;

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

// States that can reach `sinks` along edges i -> j with weights(j, i) > 0.
std::vector<bool> reaches(const Eigen::MatrixXd& weights, std::vector<bool> sinks) {
  const Eigen::Index n = weights.cols();
  std::vector<Eigen::Index> frontier;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sinks[static_cast<std::size_t>(i)]) frontier.push_back(i);
  }
  while (!frontier.empty()) {
    const Eigen::Index j = frontier.back();
    frontier.pop_back();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!sinks[static_cast<std::size_t>(i)] && weights(j, i) > 0.0) {
        sinks[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  return sinks;
}

Eigen::VectorXd policy_column(const ReducedLdp& r, Eigen::Index i,
                              const Eigen::VectorXd& lambda) {
  const auto column = r.passive.col(i);
  const double goal = r.goal_mass(i);
  // Shift by the smallest value reachable from i so the exponentials cannot
  // all underflow; the goal set has value 0.
  double shift = goal > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < column.size(); ++j) {
    if (column(j) > 0.0) shift = std::min(shift, lambda(j));
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(column.size());
  for (Eigen::Index j = 0; j < column.size(); ++j) {
    if (column(j) > 0.0) p(j) = column(j) * std::exp(shift - lambda(j));
  }
  const double denominator = p.sum() + goal * std::exp(shift);
  return p / denominator;
}

// pᵀlog(p ⊘ p̄ᵢ) + πᵢ for one column.
double column_kl(const ReducedLdp& r, Eigen::Index i, const Eigen::VectorXd& p) {
  const auto column = r.passive.col(i);
  double kl = 0.0;
  double mass = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const double pj = p(j);
    if (pj < 0.0 || !std::isfinite(pj)) {
      throw Error(ErrorCode::kInvalidProblem,
                  "policy entry (" + std::to_string(j) + ", " + std::to_string(i) +
                      ") is negative or non-finite");
    }
    mass += pj;
    if (pj == 0.0) continue;
    if (column(j) == 0.0) {
      throw Error(ErrorCode::kSupportViolation,
                  "policy moves mass " + std::to_string(i) + " -> " + std::to_string(j) +
                      " where the passive dynamics have none");
    }
    kl += pj * std::log(pj / column(j));
  }
  if (mass > 1.0 + kBalanceTol) {
    throw Error(ErrorCode::kInvalidProblem,
                "policy column " + std::to_string(i) + " sums above 1");
  }
  const double goal = std::max(0.0, 1.0 - mass);
  if (r.goal_mass(i) == 0.0) {
    if (goal > kBalanceTol) {
      throw Error(ErrorCode::kSupportViolation,
                  "policy column " + std::to_string(i) +
                      " sends mass to the goal set, which the passive dynamics cannot");
    }
  } else if (goal > 0.0) {
    kl += goal * std::log(goal / r.goal_mass(i));
  }
  return kl;
}

void check_lambda(const ReducedLdp& r, const Eigen::VectorXd& lambda) {
  require(lambda.size() == r.size(), ErrorCode::kShapeMismatch, "lambda has wrong length");
  require(lambda.allFinite(), ErrorCode::kInvalidProblem, "lambda must be finite");
}

void check_policy(const ReducedLdp& r, const Eigen::MatrixXd& policy) {
  require(policy.rows() == r.size() && policy.cols() == r.size(),
          ErrorCode::kShapeMismatch, "policy is " + shape(policy));
}

}  // namespace

bool LdpProblem::is_goal(Eigen::Index state) const {
  return std::find(goals.begin(), goals.end(), state) != goals.end();
}

void LdpProblem::validate() const {
  const Eigen::Index n = passive.rows();
  require(n >= 1 && passive.cols() == n, ErrorCode::kShapeMismatch,
          "passive dynamics must be square, got " + shape(passive));
  require(cost.size() == n, ErrorCode::kShapeMismatch, "cost has wrong length");
  require(passive.allFinite() && cost.allFinite(), ErrorCode::kInvalidProblem,
          "non-finite problem data");
  require(passive.minCoeff() >= 0.0, ErrorCode::kInvalidProblem,
          "transition probabilities must be nonnegative");
  for (Eigen::Index i = 0; i < n; ++i) {
    const double total = passive.col(i).sum();
    require(std::abs(total - 1.0) <= kBalanceTol, ErrorCode::kInvalidProblem,
            "column " + std::to_string(i) + " sums to " + std::to_string(total) +
                ", expected 1");
  }
  require(!goals.empty(), ErrorCode::kNoGoal, "at least one goal state is required");
  std::vector<bool> goal_flags(static_cast<std::size_t>(n), false);
  for (const auto g : goals) {
    require(g >= 0 && g < n, ErrorCode::kInvalidProblem,
            "goal " + std::to_string(g) + " out of range");
    require(!goal_flags[static_cast<std::size_t>(g)], ErrorCode::kInvalidProblem,
            "goal " + std::to_string(g) + " listed twice");
    goal_flags[static_cast<std::size_t>(g)] = true;
  }
  for (const auto g : goals) {
    require(cost(g) == 0.0, ErrorCode::kGoalNotAbsorbing,
            "goal " + std::to_string(g) + " must have zero cost");
    for (Eigen::Index j = 0; j < n; ++j) {
      require(j == g || passive(j, g) == 0.0, ErrorCode::kGoalNotAbsorbing,
              "goal " + std::to_string(g) + " leaks to state " + std::to_string(j));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    require(goal_flags[static_cast<std::size_t>(i)] || cost(i) > 0.0,
            ErrorCode::kInvalidProblem,
            "cost must be positive at non-goal state " + std::to_string(i));
  }
  const auto reach = reaches(passive, goal_flags);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(reach[static_cast<std::size_t>(i)], ErrorCode::kGoalUnreachable,
            "no goal is reachable from state " + std::to_string(i));
  }
}

void ReducedLdp::validate() const {
  const Eigen::Index n = passive.rows();
  require(passive.cols() == n, ErrorCode::kShapeMismatch, "passive is " + shape(passive));
  require(goal_mass.size() == n && cost.size() == n, ErrorCode::kShapeMismatch,
          "goal_mass and cost need one entry per state");
  if (n == 0) return;
  require(passive.allFinite() && goal_mass.allFinite() && cost.allFinite(),
          ErrorCode::kInvalidProblem, "non-finite problem data");
  require(passive.minCoeff() >= 0.0 && goal_mass.minCoeff() >= 0.0,
          ErrorCode::kInvalidProblem, "probabilities must be nonnegative");
  require(cost.minCoeff() >= 0.0, ErrorCode::kInvalidProblem, "cost must be nonnegative");
  for (Eigen::Index i = 0; i < n; ++i) {
    const double total = passive.col(i).sum() + goal_mass(i);
    require(std::abs(total - 1.0) <= kBalanceTol, ErrorCode::kInvalidProblem,
            "column " + std::to_string(i) + " plus goal mass sums to " +
                std::to_string(total));
  }
  std::vector<bool> exits(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) exits[static_cast<std::size_t>(i)] = goal_mass(i) > 0.0;
  const auto reach = reaches(passive, exits);
  for (Eigen::Index i = 0; i < n; ++i) {
    require(reach[static_cast<std::size_t>(i)], ErrorCode::kGoalUnreachable,
            "no goal is reachable from reduced state " + std::to_string(i));
  }
}

ReducedLdp reduce(const LdpProblem& problem) {
  problem.validate();
  ReducedLdp out;
  for (Eigen::Index i = 0; i < problem.num_states(); ++i) {
    if (!problem.is_goal(i)) out.states.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(out.states.size());
  out.passive.resize(n, n);
  out.goal_mass = Eigen::VectorXd::Zero(n);
  out.cost.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index from = out.states[static_cast<std::size_t>(c)];
    out.cost(c) = problem.cost(from);
    for (Eigen::Index rr = 0; rr < n; ++rr) {
      out.passive(rr, c) = problem.passive(out.states[static_cast<std::size_t>(rr)], from);
    }
    for (const auto g : problem.goals) out.goal_mass(c) += problem.passive(g, from);
  }
  return out;
}

double affine_residual(const ReducedLdp& reduced, const Eigen::VectorXd& z) {
  require(z.size() == reduced.size(), ErrorCode::kShapeMismatch, "z has wrong length");
  const Eigen::VectorXd g = (-reduced.cost.array()).exp().matrix();
  const Eigen::VectorXd image =
      g.cwiseProduct(reduced.passive.transpose() * z + reduced.goal_mass);
  return sup_norm(z - image);
}

Desirability solve_desirability(const ReducedLdp& reduced, const SolveConfig& cfg) {
  cfg.validate();
  reduced.validate();
  const Eigen::Index n = reduced.size();
  if (n == 0) return {};

  const auto start = std::chrono::steady_clock::now();
  const Eigen::VectorXd g = (-reduced.cost.array()).exp().matrix();
  const Eigen::MatrixXd coupling = g.asDiagonal() * reduced.passive.transpose();
  const double perron = spectral_radius(coupling);
  if (perron >= 1.0) {
    throw Error(ErrorCode::kSingularSystem,
                "ρ(GP̄ᵀ) = " + std::to_string(perron) + " >= 1");
  }

  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - coupling;
  Eigen::VectorXd z = system.partialPivLu().solve(g.cwiseProduct(reduced.goal_mass));
  const bool usable = z.allFinite() && z.minCoeff() > 0.0 &&
                      affine_residual(reduced, z) < cfg.tol;
  if (!usable) return solve_desirability_iterative(reduced, cfg);

  Desirability out;
  out.z = z.cwiseMin(1.0);
  out.lambda = -out.z.array().log().matrix();
  out.affine_residual = affine_residual(reduced, out.z);
  out.perron_radius = perron;
  out.trace.append(out.affine_residual,
                   std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count());
  return out;
}

Desirability solve_desirability_iterative(const ReducedLdp& reduced, const SolveConfig& cfg,
                                          const IterateObserver& observer) {
  reduced.validate();
  if (reduced.size() == 0) return {};
  const LdpBellman bellman(reduced);
  auto result = fixed_point_solve(bellman, ValueObject::zero(bellman.cone()), cfg, observer);

  Desirability out;
  out.lambda = result.value.vector();
  out.z = (-out.lambda.array()).exp().matrix();
  out.affine_residual = affine_residual(reduced, out.z);
  const Eigen::VectorXd g = (-reduced.cost.array()).exp().matrix();
  out.perron_radius = spectral_radius(g.asDiagonal() * reduced.passive.transpose());
  out.trace = std::move(result.trace);
  out.iterative = true;
  return out;
}

Eigen::MatrixXd optimal_policy(const ReducedLdp& reduced, const Eigen::VectorXd& lambda) {
  check_lambda(reduced, lambda);
  Eigen::MatrixXd policy(reduced.size(), reduced.size());
  for (Eigen::Index i = 0; i < reduced.size(); ++i) {
    policy.col(i) = policy_column(reduced, i, lambda);
  }
  return policy;
}

Eigen::VectorXd kl_stage_cost(const ReducedLdp& reduced, const Eigen::MatrixXd& policy) {
  check_policy(reduced, policy);
  Eigen::VectorXd h = reduced.cost;
  for (Eigen::Index i = 0; i < reduced.size(); ++i) {
    h(i) += column_kl(reduced, i, policy.col(i));
  }
  return h;
}

double verify_bellman(const ReducedLdp& reduced, const Eigen::VectorXd& lambda,
                      const Eigen::MatrixXd& policy) {
  check_lambda(reduced, lambda);
  return sup_norm(lambda - (kl_stage_cost(reduced, policy) + policy.transpose() * lambda));
}

ConeTag LdpBellman::cone() const { return ConeTag::orthant(reduced_.size()); }

std::size_t LdpBellman::num_blocks() const {
  return static_cast<std::size_t>(reduced_.size());
}

LdpBellman::Evaluation LdpBellman::evaluate(const ValueObject& lambda) const {
  return {lambda.vector()};
}

Eigen::MatrixXd LdpBellman::constant_term(const Evaluation&) const { return reduced_.cost; }

BlockMinimum<LdpBellman::Minimizer> LdpBellman::minimize_block(
    std::size_t block, const Evaluation& evaluation) const {
  const auto i = static_cast<Eigen::Index>(block);
  Eigen::VectorXd column = policy_column(reduced_, i, evaluation.lambda);
  Eigen::MatrixXd contribution = Eigen::MatrixXd::Zero(reduced_.size(), 1);
  contribution(i, 0) =
      column_kl(reduced_, i, column) + column.dot(evaluation.lambda);
  return {std::move(contribution), std::move(column)};
}

LdpSolution solve_ldp(const LdpProblem& problem, const SolveConfig& cfg) {
  LdpSolution out;
  out.reduced = reduce(problem);
  auto desirability = solve_desirability(out.reduced, cfg);
  out.z = std::move(desirability.z);
  out.lambda = std::move(desirability.lambda);
  out.trace = std::move(desirability.trace);
  out.affine_residual = desirability.affine_residual;
  out.perron_radius = desirability.perron_radius;
  out.iterative = desirability.iterative;
  if (out.reduced.size() == 0) return out;

  out.policy = optimal_policy(out.reduced, out.lambda);
  out.bellman_residual = verify_bellman(out.reduced, out.lambda, out.policy);
  if (!(out.bellman_residual < 10.0 * cfg.tol)) {
    throw Error(ErrorCode::kCertificationFailed,
                "Bellman residual " + std::to_string(out.bellman_residual) +
                    " exceeds 10·tol");
  }
  return out;
}

}  // namespace conebellman
