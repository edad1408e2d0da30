#pragma once

// Block-decomposed fixed-point iteration for Bellman equations of the form
//
//   λ = c(λ) + Σᵢ min_{Pᵢ} [ hᵢ(Pᵢ) + A*_{Pᵢ} λ ]
//
// where c(λ) collects every parameter-free term. A problem supplies the
// constant term and a closed-form minimum for each block; the engine owns
// sweeping, convergence, divergence detection and the trace.

#include <chrono>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conebellman/cone.hpp"
#include "conebellman/errors.hpp"
#include "conebellman/linalg.hpp"

namespace conebellman {

enum class Schedule { kJacobi, kGaussSeidel };

struct SolveConfig {
  double tol = 1e-10;  // sup-norm of successive iterates
  std::size_t max_iter = 100000;
  Schedule schedule = Schedule::kJacobi;
  double divergence_cap = 1e12;

  void validate() const;
};

/// Consecutive strictly growing residuals that count as divergence.
inline constexpr std::size_t kResidualGrowthWindow = 50;

struct TraceRecord {
  std::size_t iteration;
  double residual;
  std::int64_t elapsed_ns;  // since the start of the solve
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;

  [[nodiscard]] std::size_t iterations() const { return records.size(); }
  [[nodiscard]] std::vector<double> residuals() const;
  void append(double residual, std::int64_t elapsed_ns);
};

template <typename Minimizer>
struct BlockMinimum {
  Eigen::MatrixXd contribution;  // shaped like the value object's data
  Minimizer argmin;
};

/// A Bellman equation split into independently minimizable blocks.
///
/// `evaluate(λ)` precomputes whatever all blocks share at a given λ (for
/// example a factorization); `constant_term` and `minimize_block` read only
/// from that evaluation. The assembled image is the constant term plus the
/// sum of block contributions in ascending block order.
template <typename P>
concept BlockProblem = requires(const P& problem, const ValueObject& lambda,
                                std::size_t block,
                                const typename P::Evaluation& evaluation) {
  typename P::Minimizer;
  typename P::Evaluation;
  { problem.cone() } -> std::convertible_to<ConeTag>;
  { problem.num_blocks() } -> std::convertible_to<std::size_t>;
  { problem.evaluate(lambda) } -> std::same_as<typename P::Evaluation>;
  { problem.constant_term(evaluation) } -> std::convertible_to<Eigen::MatrixXd>;
  {
    problem.minimize_block(block, evaluation)
  } -> std::same_as<BlockMinimum<typename P::Minimizer>>;
};

template <BlockProblem P>
struct BellmanImage {
  Eigen::MatrixXd value;
  std::vector<typename P::Minimizer> minimizers;
};

template <BlockProblem P>
struct FixedPointResult {
  ValueObject value;
  std::vector<typename P::Minimizer> minimizers;  // argmins at `value`
  ConvergenceTrace trace;
  double stationarity;
};

/// Called after every sweep with the sweep index and the new iterate.
using IterateObserver =
    std::function<void(std::size_t iteration, const ValueObject& iterate)>;

/// One application of the blockwise Bellman operator.
template <BlockProblem P>
BellmanImage<P> bellman_image(const P& problem, const ValueObject& lambda) {
  const auto evaluation = problem.evaluate(lambda);
  BellmanImage<P> image{Eigen::MatrixXd(problem.constant_term(evaluation)), {}};
  const std::size_t blocks = problem.num_blocks();
  image.minimizers.reserve(blocks);
  for (std::size_t i = 0; i < blocks; ++i) {
    auto minimum = problem.minimize_block(i, evaluation);
    image.value += minimum.contribution;
    image.minimizers.push_back(std::move(minimum.argmin));
  }
  return image;
}

/// Sup-norm distance between λ and its Bellman image; zero at a solution.
template <BlockProblem P>
double stationarity_residual(const P& problem, const ValueObject& lambda) {
  if (!(lambda.cone() == ConeTag(problem.cone()))) {
    throw Error(ErrorCode::kConeMismatch, "lambda does not match the problem");
  }
  return sup_norm(bellman_image(problem, lambda).value - lambda.data());
}

namespace detail {

[[noreturn]] void throw_diverged(std::size_t iteration, double magnitude,
                                 double cap, const std::string& reason);
[[noreturn]] void throw_max_iter(std::size_t max_iter, double residual);

// Gauss-Seidel sweep on the orthant: entries are refreshed in index order,
// each from the Bellman image at the partially updated iterate.
template <BlockProblem P>
Eigen::MatrixXd gauss_seidel_sweep(const P& problem, const ValueObject& start) {
  const ConeTag cone = problem.cone();
  Eigen::MatrixXd work = start.data();
  for (Eigen::Index i = 0; i < work.rows(); ++i) {
    work(i, 0) = bellman_image(problem, ValueObject::from_data(cone, work)).value(i, 0);
  }
  return work;
}

}  // namespace detail

/// Iterates the blockwise Bellman operator from `initial` until successive
/// iterates differ by less than cfg.tol in sup-norm and the stationarity
/// residual of the last iterate is below 10 * cfg.tol.
///
/// Gauss-Seidel is available on the orthant only; entrywise updates of a
/// semidefinite iterate need not stay in the cone, so that combination
/// raises kInvalidConfig.
///
/// Throws kDiverged when an entry exceeds cfg.divergence_cap, turns
/// non-finite, or the residual grows for kResidualGrowthWindow consecutive
/// sweeps; throws kMaxIterExceeded after cfg.max_iter sweeps.
template <BlockProblem P>
FixedPointResult<P> fixed_point_solve(const P& problem, const ValueObject& initial,
                                      const SolveConfig& cfg,
                                      const IterateObserver& observer = {}) {
  cfg.validate();
  const ConeTag cone = problem.cone();
  if (cfg.schedule == Schedule::kGaussSeidel && cone.kind() != ConeKind::kOrthant) {
    throw Error(ErrorCode::kInvalidConfig,
                "the Gauss-Seidel schedule needs an orthant value object");
  }
  if (!(initial.cone() == cone)) {
    throw Error(ErrorCode::kConeMismatch, "initial iterate does not match the problem");
  }
  if (!initial.in_cone()) {
    throw Error(ErrorCode::kNotInCone, "initial iterate is outside the dual cone");
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&start] {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start)
        .count();
  };

  ConvergenceTrace trace;
  ValueObject current = initial;

  // Jacobi image of `current` computed by a failed stationarity check; it is
  // exactly the next Jacobi iterate.
  std::optional<BellmanImage<P>> pending;
  double previous_residual = std::numeric_limits<double>::infinity();
  std::size_t growth_streak = 0;

  for (std::size_t k = 0; k < cfg.max_iter; ++k) {
    Eigen::MatrixXd next;
    if (cfg.schedule == Schedule::kJacobi) {
      next = pending ? std::move(pending->value) : bellman_image(problem, current).value;
      pending.reset();
    } else {
      next = detail::gauss_seidel_sweep(problem, current);
    }

    if (!next.allFinite()) {
      detail::throw_diverged(k, std::numeric_limits<double>::infinity(),
                             cfg.divergence_cap, "non-finite iterate");
    }
    const double magnitude = sup_norm(next);
    if (magnitude > cfg.divergence_cap) {
      detail::throw_diverged(k, magnitude, cfg.divergence_cap,
                             "iterate magnitude exceeds cap");
    }

    const double residual = sup_norm(next - current.data());
    trace.append(residual, elapsed());
    growth_streak = residual > previous_residual ? growth_streak + 1 : 0;
    if (growth_streak >= kResidualGrowthWindow) {
      detail::throw_diverged(k, magnitude, cfg.divergence_cap,
                             "residual grew for " +
                                 std::to_string(kResidualGrowthWindow) +
                                 " consecutive sweeps");
    }
    previous_residual = residual;

    current = ValueObject::from_data(cone, std::move(next));
    if (observer) observer(k, current);

    if (residual < cfg.tol) {
      auto image = bellman_image(problem, current);
      const double stationarity = sup_norm(image.value - current.data());
      if (stationarity < 10.0 * cfg.tol) {
        return {std::move(current), std::move(image.minimizers), std::move(trace),
                stationarity};
      }
      if (cfg.schedule == Schedule::kJacobi) pending = std::move(image);
    }
  }
  detail::throw_max_iter(cfg.max_iter, previous_residual);
}

}  // namespace conebellman
