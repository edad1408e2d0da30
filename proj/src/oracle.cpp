#include "conebellman/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "conebellman/errors.hpp"

namespace conebellman::oracle {

namespace {

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::VectorXd ssp_value_iteration(const SspProblem& problem, std::size_t iterations,
                                    double tol) {
  const Eigen::Index n = problem.A.rows();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  for (std::size_t sweep = 0; sweep < iterations; ++sweep) {
    const Eigen::VectorXd input_costs = problem.r + problem.B.transpose() * lambda;
    Eigen::VectorXd next = problem.s + problem.A.transpose() * lambda;
    Eigen::Index offset = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index size = problem.block_sizes[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        double best = 0.0;  // the zero vertex
        for (Eigen::Index a = offset; a < offset + size; ++a) {
          best = std::min(best, problem.E(i, j) * input_costs(a));
        }
        next(j) += best;
      }
      offset += size;
    }
    const double change = max_abs(next - lambda);
    lambda = std::move(next);
    if (change <= tol * std::max(1.0, max_abs(lambda))) break;
  }
  return lambda;
}

Eigen::VectorXd dijkstra(const SspGraph& graph) {
  if (!graph.is_deterministic()) {
    throw Error(ErrorCode::kInvalidProblem, "dijkstra needs single-successor edges");
  }
  // Reverse adjacency: for each node, the edges arriving at it.
  std::vector<std::vector<std::pair<std::size_t, double>>> incoming(graph.nodes);
  for (const auto& e : graph.edges) {
    if (e.cost < 0.0) throw Error(ErrorCode::kInvalidProblem, "negative edge cost");
    incoming[e.to.front()].emplace_back(e.from,
                                        e.cost + graph.s(static_cast<Eigen::Index>(e.from)));
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.nodes, inf);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (const auto g : graph.goals) {
    dist[g] = 0.0;
    heap.emplace(0.0, g);
  }
  while (!heap.empty()) {
    const auto [d, node] = heap.top();
    heap.pop();
    if (d > dist[node]) continue;
    for (const auto& [from, weight] : incoming[node]) {
      if (d + weight < dist[from]) {
        dist[from] = d + weight;
        heap.emplace(dist[from], from);
      }
    }
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(graph.nodes));
  for (std::size_t v = 0; v < graph.nodes; ++v) {
    if (dist[v] == inf) {
      throw Error(ErrorCode::kUnreachableNode,
                  "node " + std::to_string(v) + " cannot reach a goal");
    }
    out(static_cast<Eigen::Index>(v)) = dist[v];
  }
  return out;
}

Eigen::MatrixXd gauss_jordan_inverse(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n) throw Error(ErrorCode::kNonSquare, "inverse of a non-square matrix");
  Eigen::MatrixXd work(n, 2 * n);
  work << m, Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(1.0, max_abs(m));
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index row = col + 1; row < n; ++row) {
      if (std::abs(work(row, col)) > std::abs(work(pivot, col))) pivot = row;
    }
    if (std::abs(work(pivot, col)) <= 1e-14 * scale) {
      throw Error(ErrorCode::kSingularInnerMatrix,
                  "vanishing pivot in column " + std::to_string(col));
    }
    work.row(col).swap(work.row(pivot));
    work.row(col) /= work(col, col);
    for (Eigen::Index row = 0; row < n; ++row) {
      if (row != col && work(row, col) != 0.0) {
        work.row(row) -= work(row, col) * work.row(col);
      }
    }
  }
  return work.rightCols(n);
}

Eigen::MatrixXd naive_dare(const LqrProblem& problem, double tol, std::size_t max_iter) {
  const auto& A = problem.A;
  const auto& B = problem.B;
  Eigen::MatrixXd lambda = problem.Q;
  for (std::size_t k = 0; k < max_iter; ++k) {
    Eigen::MatrixXd next = problem.Q + A.transpose() * lambda * A;
    if (B.cols() > 0) {
      const Eigen::MatrixXd inverse =
          gauss_jordan_inverse(problem.R + B.transpose() * lambda * B);
      next -= A.transpose() * lambda * B * inverse * B.transpose() * lambda * A;
    }
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite() || max_abs(next) > 1e12) {
      throw Error(ErrorCode::kDiverged,
                  "Riccati iterate exceeded 1e12 at sweep " + std::to_string(k));
    }
    const double change = max_abs(next - lambda);
    lambda = std::move(next);
    if (change <= tol * std::max(1.0, max_abs(lambda))) return lambda;
  }
  throw Error(ErrorCode::kMaxIterExceeded, "naive Riccati iteration did not converge");
}

Eigen::VectorXd ldp_logsumexp_vi(const ReducedLdp& reduced, std::size_t iterations,
                                 double tol) {
  const Eigen::Index n = reduced.passive.rows();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(n);
  std::vector<double> terms;
  for (std::size_t sweep = 0; sweep < iterations; ++sweep) {
    Eigen::VectorXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      // log(Σⱼ p̄ⱼᵢ e^{-λⱼ} + p̄_g(i)) as a log-sum-exp of log-weights.
      terms.clear();
      for (Eigen::Index j = 0; j < n; ++j) {
        if (reduced.passive(j, i) > 0.0) {
          terms.push_back(std::log(reduced.passive(j, i)) - lambda(j));
        }
      }
      if (reduced.goal_mass(i) > 0.0) terms.push_back(std::log(reduced.goal_mass(i)));
      const double top = *std::max_element(terms.begin(), terms.end());
      double sum = 0.0;
      for (const double t : terms) sum += std::exp(t - top);
      next(i) = reduced.cost(i) - (top + std::log(sum));
    }
    const double change = max_abs(next - lambda);
    lambda = std::move(next);
    if (change <= tol) break;
  }
  return lambda;
}

namespace {

double dense_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::VectorXd ssp_gain_value(const SspProblem& problem, const Eigen::MatrixXd& gain) {
  const Eigen::Index n = problem.A.rows();
  const Eigen::MatrixXd closed = problem.A + problem.B * gain;
  if (dense_radius(closed) >= 1.0) {
    return Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  }
  const Eigen::VectorXd stage = problem.s + gain.transpose() * problem.r;
  const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n) - closed.transpose();
  return system.fullPivLu().solve(stage);
}

double ssp_best_improvement(const SspProblem& problem, const Eigen::VectorXd& lambda,
                            std::size_t count, std::uint64_t seed) {
  const Eigen::Index n = problem.A.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t sample = 0; sample < count; ++sample) {
    Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(problem.B.cols(), n);
    Eigen::Index offset = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index size = problem.block_sizes[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n && size > 0; ++j) {
        Eigen::VectorXd weights(size);
        for (Eigen::Index a = 0; a < size; ++a) weights(a) = unit(rng);
        weights *= unit(rng) * problem.E(i, j) / weights.sum();
        gain.block(offset, j, size, 1) = weights;
      }
      offset += size;
    }
    const Eigen::VectorXd value = ssp_gain_value(problem, gain);
    if (!value.allFinite()) continue;
    best = std::max(best, (lambda - value).maxCoeff());
  }
  return best;
}

Eigen::MatrixXd lqr_gain_value(const LqrProblem& problem, const Eigen::MatrixXd& gain) {
  const Eigen::Index n = problem.A.rows();
  const Eigen::MatrixXd closed = problem.A + problem.B * gain;
  const Eigen::MatrixXd stage = problem.Q + gain.transpose() * problem.R * gain;
  // vec(ΦᵀXΦ) = (Φᵀ ⊗ Φᵀ) vec(X) with column-major vec.
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n * n, n * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      system.block(b * n, a * n, n, n) -= closed(a, b) * closed.transpose();
    }
  }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(stage.data(), n * n);
  const Eigen::VectorXd solution = system.fullPivLu().solve(rhs);
  Eigen::MatrixXd value = Eigen::Map<const Eigen::MatrixXd>(solution.data(), n, n);
  return 0.5 * (value + value.transpose());
}

double lqr_best_improvement(const LqrProblem& problem, const Eigen::MatrixXd& lambda,
                            const Eigen::MatrixXd& gain, std::size_t count,
                            std::uint64_t seed) {
  const Eigen::Index n = problem.A.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> exponent(-4.0, -1.0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t sample = 0; sample < count; ++sample) {
    const double scale = std::pow(10.0, exponent(rng));
    Eigen::MatrixXd perturbed = gain;
    for (Eigen::Index k = 0; k < perturbed.size(); ++k) {
      perturbed.data()[k] += scale * normal(rng);
    }
    Eigen::VectorXd y(n);
    for (Eigen::Index k = 0; k < n; ++k) y(k) = normal(rng);
    y.normalize();
    if (dense_radius(problem.A + problem.B * perturbed) >= 1.0) continue;
    const Eigen::MatrixXd value = lqr_gain_value(problem, perturbed);
    best = std::max(best, y.dot(lambda * y) - y.dot(value * y));
  }
  return best;
}

RolloutStats ldp_rollout(const ReducedLdp& reduced, const Eigen::MatrixXd& policy,
                         Eigen::Index start, std::size_t horizon, std::size_t trials,
                         std::uint64_t seed) {
  if (trials == 0 || horizon == 0) {
    throw Error(ErrorCode::kBadSeedConfig, "trials and horizon must be positive");
  }
  const Eigen::Index n = reduced.passive.rows();
  if (start < 0 || start >= n) {
    throw Error(ErrorCode::kBadSeedConfig, "start state out of range");
  }

  // Per-state step cost and goal-jump probability under the policy.
  Eigen::VectorXd step_cost(n);
  Eigen::VectorXd exit_prob(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double kl = 0.0;
    double stay = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double p = policy(j, i);
      stay += p;
      if (p > 0.0) kl += p * std::log(p / reduced.passive(j, i));
    }
    const double exit = std::max(0.0, 1.0 - stay);
    if (exit > 0.0) kl += exit * std::log(exit / reduced.goal_mass(i));
    step_cost(i) = reduced.cost(i) + kl;
    exit_prob(i) = exit;
  }

  // Welford running mean / sum of squared deviations.
  double mean = 0.0;
  double squares = 0.0;
  std::size_t truncated = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    std::mt19937_64 rng(seed + t);
    Eigen::Index state = start;
    double total = 0.0;
    bool absorbed = false;
    for (std::size_t step = 0; step < horizon; ++step) {
      total += step_cost(state);
      double u = unit(rng);
      if (u < exit_prob(state)) {
        absorbed = true;
        break;
      }
      u -= exit_prob(state);
      Eigen::Index next = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double p = policy(j, state);
        if (p <= 0.0) continue;
        next = j;
        if (u < p) break;
        u -= p;
      }
      if (next < 0) {
        absorbed = true;
        break;
      }
      // Rounding can leave u just past the last bucket; `next` then holds
      // the last state with positive probability.
      state = next;
    }
    if (!absorbed) ++truncated;
    const double delta = total - mean;
    mean += delta / static_cast<double>(t + 1);
    squares += delta * (total - mean);
  }

  RolloutStats stats;
  stats.trials = trials;
  stats.horizon = horizon;
  const auto count = static_cast<double>(trials);
  stats.mean_cost = mean;
  const double variance = trials > 1 ? squares / (count - 1.0) : 0.0;
  stats.std_error = std::sqrt(variance / count);
  stats.truncated_fraction = static_cast<double>(truncated) / count;
  return stats;
}

}  // namespace conebellman::oracle
