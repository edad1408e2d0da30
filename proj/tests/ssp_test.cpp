#include <vector>

#include <gtest/gtest.h>

#include "conebellman/instances.hpp"
#include "conebellman/oracle.hpp"
#include "conebellman/ssp.hpp"
#include "conebellman/ssp_graph.hpp"
#include "test_support.hpp"

namespace conebellman {
namespace {

using testing::single_state_ssp;

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvalidConfig;
}

Eigen::MatrixXd scalar(double x) { return Eigen::MatrixXd::Constant(1, 1, x); }

// 0 -> 1 -> 2 -> goal 3 at cost 1 each, or 0 -> goal directly at cost 5.
SspGraph chain() {
  SspGraph g;
  g.nodes = 4;
  g.goals = {3};
  g.s = Eigen::Vector4d(0.5, 0.5, 0.5, 0.0);
  g.edges = {{0, {1}, {1.0}, 1.0}, {0, {3}, {1.0}, 5.0}, {1, {2}, {1.0}, 1.0},
             {2, {3}, {1.0}, 1.0}, {1, {0}, {1.0}, 0.5}};
  return g;
}

TEST(ValidateGain, Examples) {
  const auto p = single_state_ssp();
  EXPECT_TRUE(validate_gain(p, scalar(0.0)));
  EXPECT_FALSE(validate_gain(p, scalar(2.0)));
  EXPECT_TRUE(validate_gain(p, scalar(1.0)));
  EXPECT_FALSE(validate_gain(p, scalar(-0.5)));
  EXPECT_THROW((void)validate_gain(p, Eigen::MatrixXd::Zero(2, 1)), Error);
}

TEST(BellmanUpdate, SingleState) {
  const auto p = single_state_ssp();
  auto at3 = bellman_update(p, Eigen::VectorXd::Constant(1, 3.0));
  EXPECT_DOUBLE_EQ(at3.value(0), 3.0);
  EXPECT_DOUBLE_EQ(at3.gain(0, 0), 1.0);
  auto at0 = bellman_update(p, Eigen::VectorXd::Zero(1));
  EXPECT_DOUBLE_EQ(at0.value(0), 1.0);
  EXPECT_DOUBLE_EQ(at0.gain(0, 0), 0.0);
  EXPECT_EQ(code_of([&] { (void)bellman_update(p, Eigen::VectorXd::Constant(1, -1.0)); }),
            ErrorCode::kNegativeLambda);
}

TEST(BellmanUpdate, NoControlAuthority) {
  SspProblem p;
  p.A = Eigen::Matrix2d{{0.5, 0.1}, {0.2, 0.3}};
  p.B = Eigen::MatrixXd::Zero(2, 2);
  p.s = Eigen::Vector2d(1.0, 2.0);
  p.r = Eigen::Vector2d(1.0, 1.0);
  p.block_sizes = {1, 1};
  p.E = Eigen::Matrix2d::Identity();
  const Eigen::Vector2d lambda(3.0, 4.0);
  const auto update = bellman_update(p, lambda);
  EXPECT_LT((update.value - (p.s + p.A.transpose() * lambda)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(update.gain.isZero());
}

TEST(BellmanUpdate, TieGoesToLowestIndex) {
  SspProblem p;
  p.A = scalar(1.0);
  p.B = Eigen::MatrixXd::Constant(1, 2, -1.0);
  p.s = Eigen::VectorXd::Constant(1, 1.0);
  p.r = Eigen::Vector2d(1.0, 1.0);
  p.block_sizes = {2};
  p.E = scalar(1.0);
  const auto update = bellman_update(p, Eigen::VectorXd::Constant(1, 5.0));
  EXPECT_EQ(update.gain(0, 0), 1.0);
  EXPECT_EQ(update.gain(1, 0), 0.0);
}

TEST(SolveSsp, SingleState) {
  const auto sol = solve_ssp(single_state_ssp());
  EXPECT_NEAR(sol.lambda(0), 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(sol.gain(0, 0), 1.0);
  EXPECT_NEAR(sol.closed_loop_radius, 0.0, 1e-12);
  const auto vi = oracle::ssp_value_iteration(single_state_ssp(), 100000);
  EXPECT_NEAR(vi(0), 3.0, 1e-12);
}

TEST(SolveSsp, UncontrolledUnstableMassDiverges) {
  SspProblem p;
  p.A = scalar(2.0);
  p.B = Eigen::MatrixXd::Zero(1, 0);
  p.s = Eigen::VectorXd::Constant(1, 1.0);
  p.r = Eigen::VectorXd::Zero(0);
  p.block_sizes = {0};
  p.E = scalar(1.0);
  EXPECT_EQ(code_of([&] { (void)solve_ssp(p); }), ErrorCode::kDiverged);
  p.A = scalar(1.0);  // marginal: linear drift, no growth in the residual
  SolveConfig cfg;
  cfg.max_iter = 2000;
  EXPECT_EQ(code_of([&] { (void)solve_ssp(p, cfg); }), ErrorCode::kDiverged);
}

TEST(SolveSsp, StableUncontrolledIsNeumannSeries) {
  SspProblem p;
  p.A = Eigen::Matrix2d{{0.5, 0.2}, {0.1, 0.3}};
  p.B = Eigen::MatrixXd::Zero(2, 0);
  p.s = Eigen::Vector2d(1.0, 2.0);
  p.r = Eigen::VectorXd::Zero(0);
  p.block_sizes = {0, 0};
  p.E = Eigen::Matrix2d::Identity();
  const Eigen::Vector2d expected =
      (Eigen::Matrix2d::Identity() - p.A.transpose()).inverse() * p.s;
  EXPECT_LT((solve_ssp(p).lambda - expected).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((oracle::ssp_value_iteration(p, 100000) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SolveSsp, RejectsMalformedProblems) {
  auto p = single_state_ssp();
  p.s(0) = 0.0;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kInvalidProblem);
  p = single_state_ssp();
  p.block_sizes = {2};
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kShapeMismatch);
  p = single_state_ssp();
  p.A(0, 0) = -1.0;
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kInvalidProblem);
}

TEST(SspGraph, ChainMatchesHandDistances) {
  const auto g = chain();
  const auto compiled = compile(g);
  ASSERT_EQ(compiled.problem.num_states(), 3);
  ASSERT_EQ(compiled.problem.num_inputs(), 5);
  const auto sol = solve_ssp(compiled.problem);
  const Eigen::VectorXd values = values_by_node(compiled, sol.lambda);
  EXPECT_LT((values - Eigen::Vector4d(4.5, 3.0, 1.5, 0.0)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((values - oracle::dijkstra(g)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(policy_from_gain(compiled, sol.gain),
            (std::vector<std::ptrdiff_t>{0, 2, 3, -1}));
}

TEST(SspGraph, Validation) {
  auto g = chain();
  g.edges.push_back({3, {0}, {1.0}, 1.0});
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::kInvalidProblem);
  g = chain();
  g.edges[0] = {0, {1, 2}, {0.5, 0.4}, 1.0};
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::kInvalidProblem);
  g = chain();
  g.s(1) = 0.0;
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::kInvalidProblem);
  g = chain();
  g.edges[0].to = {7};
  EXPECT_EQ(code_of([&] { g.validate(); }), ErrorCode::kInvalidProblem);
}

TEST(SspGraph, UnreachableGoalDiverges) {
  SspGraph g;
  g.nodes = 3;
  g.goals = {2};
  g.s = Eigen::Vector3d(1.0, 1.0, 0.0);
  g.edges = {{0, {1}, {1.0}, 1.0}, {1, {0}, {1.0}, 1.0}};
  SolveConfig cfg;
  cfg.max_iter = 5000;
  EXPECT_EQ(code_of([&] { (void)solve_ssp(compile(g).problem, cfg); }),
            ErrorCode::kDiverged);
  EXPECT_EQ(code_of([&] { (void)oracle::dijkstra(g); }), ErrorCode::kUnreachableNode);
}

TEST(SspProperties, IteratesAreMonotoneFromZero) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (const bool deterministic : {true, false}) {
      const auto compiled =
          compile(instances::random_ssp_graph(5 + 3 * seed, seed, deterministic));
      Eigen::VectorXd previous = Eigen::VectorXd::Zero(compiled.problem.num_states());
      bool monotone = true;
      (void)solve_ssp(compiled.problem, {}, [&](std::size_t, const ValueObject& v) {
        const Eigen::VectorXd current = v.vector();
        if ((current - previous).minCoeff() < -1e-14) monotone = false;
        previous = current;
      });
      EXPECT_TRUE(monotone) << "seed " << seed;
    }
  }
}

TEST(SspProperties, RandomGraphsMatchOracles) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto det = instances::random_ssp_graph(12, seed, true);
    const auto cd = compile(det);
    const auto sd = solve_ssp(cd.problem);
    EXPECT_LT((values_by_node(cd, sd.lambda) - oracle::dijkstra(det)).cwiseAbs().maxCoeff(),
              1e-12);

    const auto sto = compile(instances::random_ssp_graph(12, seed, false));
    SolveConfig cfg;
    cfg.tol = 1e-12;
    const auto ss = solve_ssp(sto.problem, cfg);
    EXPECT_LT((ss.lambda - oracle::ssp_value_iteration(sto.problem, 1000000))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
    EXPECT_TRUE(validate_gain(sto.problem, ss.gain));
    EXPECT_LT(ss.closed_loop_radius, 1.0);
    EXPECT_LE(oracle::ssp_best_improvement(sto.problem, ss.lambda, 100, seed), 1e-9);
    // The optimal gain's own value reproduces λ.
    EXPECT_LT((oracle::ssp_gain_value(sto.problem, ss.gain) - ss.lambda).cwiseAbs().maxCoeff(),
              1e-9);
  }
}

TEST(SspProperties, SchedulesAgree) {
  const auto compiled = compile(instances::random_ssp_graph(20, 4, false));
  SolveConfig cfg;
  cfg.tol = 1e-12;
  const auto jacobi = solve_ssp(compiled.problem, cfg);
  cfg.schedule = Schedule::kGaussSeidel;
  const auto seidel = solve_ssp(compiled.problem, cfg);
  EXPECT_LT((jacobi.lambda - seidel.lambda).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace
}  // namespace conebellman
