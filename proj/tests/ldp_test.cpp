#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "conebellman/instances.hpp"
#include "conebellman/ldp.hpp"
#include "conebellman/oracle.hpp"
#include "test_support.hpp"

namespace conebellman {
namespace {

using testing::random_feasible_policy;
using testing::single_state_ldp;

// Closed form of the single-state instance: z = 0.5/(e - 0.5).
const double kSingleZ = 0.5 / (std::exp(1.0) - 0.5);
const double kSingleLambda = -std::log(kSingleZ);

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidConfig;
}

ReducedLdp direct_to_goal(const Eigen::VectorXd& cost) {
  const Eigen::Index n = cost.size();
  ReducedLdp r;
  r.passive = Eigen::MatrixXd::Zero(n, n);
  r.goal_mass = Eigen::VectorXd::Ones(n);
  r.cost = cost;
  for (Eigen::Index i = 0; i < n; ++i) r.states.push_back(i);
  return r;
}

TEST(Reduce, SingleState) {
  const auto r = reduce(single_state_ldp());
  ASSERT_EQ(r.size(), 1);
  EXPECT_EQ(r.passive(0, 0), 0.5);
  EXPECT_EQ(r.goal_mass(0), 0.5);
  EXPECT_EQ(r.states, (std::vector<Eigen::Index>{0}));
}

TEST(Reduce, AggregatesSeveralGoals) {
  LdpProblem p;
  p.passive = Eigen::Matrix3d{{0.2, 0.0, 0.0}, {0.5, 1.0, 0.0}, {0.3, 0.0, 1.0}};
  p.cost = Eigen::Vector3d(1.0, 0.0, 0.0);
  p.goals = {1, 2};
  const auto r = reduce(p);
  EXPECT_DOUBLE_EQ(r.goal_mass(0), 0.8);
}

TEST(Reduce, AllMassToGoal) {
  LdpProblem p;
  p.passive = Eigen::Matrix3d{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
  p.cost = Eigen::Vector3d(1.0, 2.0, 0.0);
  p.goals = {2};
  const auto r = reduce(p);
  EXPECT_TRUE(r.passive.isZero());
  EXPECT_EQ(r.goal_mass, Eigen::Vector2d(1.0, 1.0));
}

TEST(Validate, StructuralErrors) {
  auto p = single_state_ldp();
  p.goals.clear();
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kNoGoal);
  p = single_state_ldp();
  p.passive(0, 0) = 0.4;  // column 0 sums to 0.9
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kInvalidProblem);
  p = single_state_ldp();
  p.passive.col(1) = Eigen::Vector2d(0.5, 0.5);  // goal leaks
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kGoalNotAbsorbing);
  p = single_state_ldp();
  p.passive.col(0) = Eigen::Vector2d(1.0, 0.0);  // self-loop forever
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kGoalUnreachable);
  p = single_state_ldp();
  p.cost(0) = 0.0;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kInvalidProblem);
}

TEST(Desirability, SingleState) {
  const auto d = solve_desirability(reduce(single_state_ldp()));
  EXPECT_NEAR(d.z(0), kSingleZ, 1e-15);
  EXPECT_NEAR(d.lambda(0), kSingleLambda, 1e-14);
  EXPECT_NEAR(d.z(0), 0.225399, 1e-6);
  EXPECT_FALSE(d.iterative);
  EXPECT_LT(d.affine_residual, 1e-15);
  EXPECT_NEAR(oracle::ldp_logsumexp_vi(reduce(single_state_ldp()), 100000)(0), kSingleLambda,
              1e-13);
}

TEST(Desirability, OneStepToGoal) {
  const Eigen::Vector3d s(0.3, 1.0, 2.5);
  const auto r = direct_to_goal(s);
  const auto d = solve_desirability(r);
  EXPECT_LT((d.lambda - s).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((d.z - (-s).array().exp().matrix()).cwiseAbs().maxCoeff(), 1e-15);
  const auto policy = optimal_policy(r, s);
  EXPECT_LT(verify_bellman(r, s, policy), 1e-12);
  EXPECT_LT((oracle::ldp_logsumexp_vi(r, 1) - s).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Desirability, ZeroCostMeansZeroValue) {
  ReducedLdp r;
  r.passive = Eigen::Matrix2d{{0.2, 0.3}, {0.5, 0.1}};
  r.goal_mass = Eigen::Vector2d(0.3, 0.6);
  r.cost = Eigen::Vector2d::Zero();
  r.states = {0, 1};
  const auto d = solve_desirability(r);
  EXPECT_LT((d.z - Eigen::Vector2d::Ones()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(d.lambda.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT(oracle::ldp_logsumexp_vi(r, 10000).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Desirability, IterativeFallbackAgrees) {
  const auto problem = instances::random_ldp(15, 4);
  const auto r = reduce(problem);
  SolveConfig cfg;
  cfg.tol = 1e-13;
  const auto direct = solve_desirability(r, cfg);
  const auto iterative = solve_desirability_iterative(r, cfg);
  EXPECT_TRUE(iterative.iterative);
  EXPECT_LT((direct.lambda - iterative.lambda).cwiseAbs().maxCoeff(), 1e-10);
  // From λ = 0 the values only grow.
  std::vector<double> residuals = iterative.trace.residuals();
  for (std::size_t k = 2; k < residuals.size(); ++k) {
    EXPECT_LE(residuals[k], residuals[k - 1] * (1.0 + 1e-12));
  }
}

TEST(OptimalPolicy, Examples) {
  const auto r = reduce(single_state_ldp());
  const auto d = solve_desirability(r);
  const auto policy = optimal_policy(r, d.lambda);
  EXPECT_NEAR(policy(0, 0), 0.5 * kSingleZ / (0.5 * kSingleZ + 0.5), 1e-15);
  EXPECT_NEAR(policy(0, 0), 0.18394, 1e-5);
  // Flat values leave the passive dynamics unchanged.
  const auto problem = instances::random_ldp(8, 1);
  const auto rr = reduce(problem);
  const auto passive = optimal_policy(rr, Eigen::VectorXd::Zero(rr.size()));
  EXPECT_LT((passive - rr.passive).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KlStageCost, Examples) {
  const auto problem = instances::random_ldp(8, 2);
  const auto r = reduce(problem);
  EXPECT_LT((kl_stage_cost(r, r.passive) - r.cost).cwiseAbs().maxCoeff(), 1e-15);

  Eigen::MatrixXd bad = r.passive;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  bool found = false;
  for (Eigen::Index j = 0; j < r.size() && !found; ++j) {
    for (Eigen::Index i = 0; i < r.size() && !found; ++i) {
      if (r.passive(i, j) == 0.0) {
        row = i;
        col = j;
        found = true;
      }
    }
  }
  ASSERT_TRUE(found);
  bad(row, col) = 0.01;
  EXPECT_EQ(code_of([&] { (void)kl_stage_cost(r, bad); }), ErrorCode::kSupportViolation);
}

TEST(VerifyBellman, SingleState) {
  const auto r = reduce(single_state_ldp());
  const auto d = solve_desirability(r);
  const auto policy = optimal_policy(r, d.lambda);
  EXPECT_LT(verify_bellman(r, d.lambda, policy), 1e-12);
  const Eigen::VectorXd shifted = d.lambda.array() + 0.1;
  EXPECT_GE(verify_bellman(r, shifted, optimal_policy(r, shifted)), 0.05);
}

TEST(SolveLdp, SingleStatePipeline) {
  const auto sol = solve_ldp(single_state_ldp());
  EXPECT_NEAR(sol.lambda(0), kSingleLambda, 1e-14);
  EXPECT_LT(sol.bellman_residual, 1e-12);
  EXPECT_LT(sol.perron_radius, 1.0);
}

TEST(LdpProperties, RandomInstances) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const auto problem = instances::random_ldp(5 + 3 * static_cast<Eigen::Index>(seed), seed);
    const auto sol = solve_ldp(problem);
    const auto& r = sol.reduced;
    EXPECT_LT(sol.affine_residual, 1e-12);
    EXPECT_LT(sol.bellman_residual, 1e-9);
    EXPECT_LT((sol.lambda - oracle::ldp_logsumexp_vi(r, 1000000)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_GE(sol.lambda.minCoeff(), 0.0);
    // Sparsity is preserved exactly.
    for (Eigen::Index k = 0; k < r.passive.size(); ++k) {
      EXPECT_EQ(sol.policy.data()[k] > 0.0, r.passive.data()[k] > 0.0);
    }
    // The closed-form policy is the blockwise minimum.
    std::mt19937_64 rng(seed);
    for (int sample = 0; sample < 20; ++sample) {
      const auto policy = random_feasible_policy(r, rng);
      const Eigen::VectorXd h = kl_stage_cost(r, policy);
      EXPECT_GE((h - r.cost).minCoeff(), -1e-12);
      EXPECT_GE((h + policy.transpose() * sol.lambda - sol.lambda).minCoeff(), -1e-10);
    }
  }
}

}  // namespace
}  // namespace conebellman
