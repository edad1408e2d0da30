#include <cmath>

#include <gtest/gtest.h>

#include "conebellman/instances.hpp"
#include "conebellman/lqr.hpp"
#include "conebellman/oracle.hpp"

namespace conebellman {
namespace {

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

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

LqrProblem scalar_problem(double a, double b, double q, double r) {
  return {scalar(a), scalar(b), scalar(q), scalar(r)};
}

double sup(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

TEST(Cholesky, Examples) {
  Eigen::MatrixXd s(2, 2);
  s << 4, 2, 2, 3;
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 0, 1, std::sqrt(2.0);
  EXPECT_LT(sup(cholesky_factor(s) - expected), 1e-15);
  EXPECT_EQ(cholesky_factor(Eigen::MatrixXd::Identity(3, 3)), Eigen::MatrixXd::Identity(3, 3));
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  EXPECT_EQ(code_of([&] { (void)cholesky_factor(indefinite); }),
            ErrorCode::kNotPositiveDefinite);
}

TEST(Cholesky, TriangularSolves) {
  Eigen::MatrixXd s(3, 3);
  s << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 2;
  const auto l = cholesky_factor(s);
  EXPECT_LT(sup(l * l.transpose() - s), 1e-14);
  const Eigen::MatrixXd rhs = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_LT(sup(l * forward_substitute(l, rhs) - rhs), 1e-14);
  EXPECT_LT(sup(l.transpose() * back_substitute_transposed(l, rhs) - rhs), 1e-14);
}

TEST(RiccatiStep, ScalarHandComputation) {
  const auto step = riccati_step(scalar_problem(1, 1, 1, 1), scalar(1.0));
  EXPECT_NEAR(step.factor(0, 0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(step.projected(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(step.value(0, 0), 1.5, 1e-15);
  EXPECT_NEAR(step.gain(0, 0), -0.5, 1e-15);
}

TEST(RiccatiStep, DegenerateDynamics) {
  LqrProblem p{Eigen::Matrix2d{{0.5, 0.1}, {0.0, 0.7}}, Eigen::MatrixXd::Zero(2, 1),
               Eigen::Matrix2d::Identity(), scalar(1.0)};
  const Eigen::Matrix2d lambda{{2.0, 0.3}, {0.3, 1.0}};
  auto step = riccati_step(p, lambda);
  EXPECT_LT(sup(step.value - (p.Q + p.A.transpose() * lambda * p.A)), 1e-15);
  EXPECT_TRUE(step.gain.isZero());

  p.A.setZero();
  p.B = Eigen::Vector2d(1.0, 0.5);
  step = riccati_step(p, lambda);
  EXPECT_LT(sup(step.value - p.Q), 1e-15);
  EXPECT_TRUE(step.gain.isZero());
}

TEST(SolveLqr, GoldenRatio) {
  SolveConfig cfg;
  cfg.tol = 1e-13;
  const auto sol = solve_lqr(scalar_problem(1, 1, 1, 1), cfg);
  EXPECT_NEAR(sol.lambda(0, 0), kGolden, 1e-12);
  EXPECT_NEAR(sol.gain(0, 0), -kGolden / (1.0 + kGolden), 1e-12);
  EXPECT_NEAR(oracle::naive_dare(scalar_problem(1, 1, 1, 1), 1e-15)(0, 0), kGolden, 1e-12);
  EXPECT_NEAR(cost_of_gain(scalar_problem(1, 1, 1, 1), sol.gain, scalar(1.0)), kGolden, 1e-12);
}

TEST(SolveLqr, NoDynamics) {
  LqrProblem p{Eigen::Matrix2d::Zero(), Eigen::Matrix2d{{1.0, 0.0}, {0.3, 1.0}},
               Eigen::Matrix2d{{2.0, 0.5}, {0.5, 1.0}}, Eigen::Matrix2d::Identity()};
  const auto sol = solve_lqr(p);
  EXPECT_LT(sup(sol.lambda - p.Q), 1e-15);
  EXPECT_TRUE(sol.gain.isZero());
}

TEST(SolveLqr, UnstabilizableDiverges) {
  EXPECT_EQ(code_of([&] { (void)solve_lqr(scalar_problem(2, 0, 1, 1)); }),
            ErrorCode::kDiverged);
  LqrProblem no_inputs{scalar(2.0), Eigen::MatrixXd::Zero(1, 0), scalar(1.0),
                       Eigen::MatrixXd::Zero(0, 0)};
  EXPECT_EQ(code_of([&] { (void)solve_lqr(no_inputs); }), ErrorCode::kDiverged);
}

TEST(SolveLqr, Validation) {
  auto p = scalar_problem(1, 1, 0, 0);
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::kInvalidProblem);
  LqrProblem asym{Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity(),
                  Eigen::Matrix2d{{1.0, 0.2}, {0.0, 1.0}}, Eigen::Matrix2d::Identity()};
  EXPECT_EQ(code_of([&] { asym.validate(); }), ErrorCode::kInvalidProblem);
  LqrProblem shape{Eigen::Matrix2d::Identity(), Eigen::MatrixXd::Identity(3, 1),
                   Eigen::Matrix2d::Identity(), scalar(1.0)};
  EXPECT_EQ(code_of([&] { shape.validate(); }), ErrorCode::kShapeMismatch);
  // Semidefinite Q with definite R is accepted with a warning.
  LqrProblem semidef{Eigen::Matrix2d{{0.9, 0.2}, {0.0, 0.8}}, Eigen::Matrix2d::Identity(),
                     Eigen::Matrix2d{{1.0, 0.0}, {0.0, 0.0}}, Eigen::Matrix2d::Identity()};
  EXPECT_NO_THROW(semidef.validate());
  EXPECT_FALSE(semidef.intake_warnings().empty());
}

TEST(CostOfGain, Examples) {
  EXPECT_NEAR(cost_of_gain(scalar_problem(0.5, 1, 1, 1), scalar(0.0), scalar(1.0)),
              4.0 / 3.0, 1e-12);
  EXPECT_EQ(code_of([&] { (void)gain_value(scalar_problem(1, 1, 1, 1), scalar(0.5)); }),
            ErrorCode::kUnstableGain);
  EXPECT_NEAR(oracle::naive_dare(scalar_problem(0.5, 0, 1, 1), 1e-15)(0, 0), 4.0 / 3.0, 1e-12);
}

TEST(LqrProperties, RandomSystemsMatchOracles) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 6);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(seed % n);
    const auto p = instances::random_lqr(n, m, seed);
    SolveConfig cfg;
    cfg.tol = 1e-12;
    const auto sol = solve_lqr(p, cfg);
    const double scale = std::max(1.0, sup(sol.lambda));
    EXPECT_LT(sup(sol.lambda - oracle::naive_dare(p, 1e-14)), 1e-9 * scale) << seed;
    EXPECT_LT(sol.closed_loop_radius, 1.0);
    EXPECT_LT(sol.riccati_residual, 1e-9);
    // First-order condition of the gain minimization.
    const Eigen::MatrixXd inner = p.R + p.B.transpose() * sol.lambda * p.B;
    EXPECT_LT(sup(inner * sol.gain + p.B.transpose() * sol.lambda * p.A), 1e-10 * scale);
    EXPECT_LT(sup(gain_value(p, sol.gain) - sol.lambda), 1e-8 * scale);
    EXPECT_LT(sup(oracle::lqr_gain_value(p, sol.gain) - sol.lambda), 1e-8 * scale);
    EXPECT_LE(oracle::lqr_best_improvement(p, sol.lambda, sol.gain, 100, seed), 1e-8 * scale);
    // Minimum over gains: λ ⪯ λ_K for every stabilizing K, so λ_K - λ is PSD.
    Eigen::MatrixXd other = sol.gain;
    other(0, 0) += 1e-2;
    if (Eigen::EigenSolver<Eigen::MatrixXd>(p.A + p.B * other, false)
            .eigenvalues()
            .cwiseAbs()
            .maxCoeff() < 1.0) {
      const Eigen::MatrixXd gap = gain_value(p, other) - sol.lambda;
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gap).eigenvalues().minCoeff(),
                -1e-8 * scale);
    }
  }
}

TEST(LqrProperties, GaussSeidelIsRejected) {
  SolveConfig cfg;
  cfg.schedule = Schedule::kGaussSeidel;
  EXPECT_EQ(code_of([&] { (void)solve_lqr(instances::random_lqr(4, 2, 9), cfg); }),
            ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace conebellman
