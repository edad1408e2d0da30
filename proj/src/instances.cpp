#include "conebellman/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace conebellman::instances {

namespace {

std::vector<std::size_t> shuffled(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

SspGraph random_ssp_graph(std::size_t n, std::uint64_t seed, bool deterministic) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cost(1.0, 10.0);
  std::uniform_real_distribution<double> state_cost(0.01, 0.1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_node(0, n);
  std::uniform_int_distribution<int> extra_actions(0, 2);
  std::uniform_int_distribution<int> extra_successors(0, 2);

  SspGraph graph;
  graph.nodes = n + 1;
  graph.goals = {n};
  graph.s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + 1));
  for (std::size_t v = 0; v < n; ++v) graph.s(static_cast<Eigen::Index>(v)) = state_cost(rng);

  const auto make_edge = [&](std::size_t from, std::size_t anchor, bool guaranteed) {
    SspEdge e;
    e.from = from;
    e.cost = cost(rng);
    e.to.push_back(anchor);
    if (deterministic) {
      e.prob.push_back(1.0);
      return e;
    }
    const int others = extra_successors(rng);
    if (others == 0) {
      e.prob.push_back(1.0);
      return e;
    }
    std::vector<double> weights{unit(rng) + 0.1};
    double rest = 0.0;
    for (int k = 0; k < others; ++k) {
      e.to.push_back(any_node(rng));
      weights.push_back(unit(rng) + 0.1);
      rest += weights.back();
    }
    const double anchor_mass =
        guaranteed ? 0.3 + 0.7 * unit(rng) : weights[0] / (weights[0] + rest);
    weights[0] = anchor_mass;
    for (std::size_t k = 1; k < weights.size(); ++k) {
      weights[k] *= (1.0 - anchor_mass) / rest;
    }
    e.prob = std::move(weights);
    return e;
  };

  const auto order = shuffled(n, rng);
  for (std::size_t rank = 0; rank < n; ++rank) {
    const std::size_t from = order[rank];
    std::size_t anchor = n;
    if (rank > 0) {
      std::uniform_int_distribution<std::size_t> earlier(0, rank);
      const std::size_t pick = earlier(rng);
      anchor = pick == rank ? n : order[pick];
    }
    graph.edges.push_back(make_edge(from, anchor, true));
    const int extras = extra_actions(rng);
    for (int k = 0; k < extras; ++k) {
      graph.edges.push_back(make_edge(from, any_node(rng), false));
    }
  }
  return graph;
}

LqrProblem random_lqr(Eigen::Index n, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> modulus(0.1, 1.2);
  std::uniform_real_distribution<double> angle(0.0, 3.141592653589793);
  std::uniform_real_distribution<double> sign(-1.0, 1.0);

  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    const double radius = modulus(rng);
    if (i + 1 < n && sign(rng) > 0.0) {
      const double theta = angle(rng);
      blocks(i, i) = radius * std::cos(theta);
      blocks(i, i + 1) = -radius * std::sin(theta);
      blocks(i + 1, i) = radius * std::sin(theta);
      blocks(i + 1, i + 1) = radius * std::cos(theta);
      i += 2;
    } else {
      blocks(i, i) = sign(rng) < 0.0 ? -radius : radius;
      i += 1;
    }
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, n, rng));
  const Eigen::MatrixXd basis = qr.householderQ();

  LqrProblem p;
  p.A = basis * blocks * basis.transpose();
  p.B = gaussian(n, m, rng);
  const Eigen::MatrixXd q_factor = gaussian(n, n, rng);
  p.Q = q_factor * q_factor.transpose() / static_cast<double>(n) +
        0.5 * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r_factor = gaussian(m, m, rng);
  p.R = r_factor * r_factor.transpose() / static_cast<double>(std::max<Eigen::Index>(m, 1)) +
        0.5 * Eigen::MatrixXd::Identity(m, m);
  return p;
}

LdpProblem random_ldp(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::uniform_real_distribution<double> cost(0.1, 1.0);
  std::uniform_int_distribution<int> goal_count(1, 2);
  std::uniform_int_distribution<int> extra(0, 3);

  const Eigen::Index goals = goal_count(rng);
  const Eigen::Index total = n + goals;
  std::uniform_int_distribution<Eigen::Index> any_state(0, total - 1);
  std::uniform_int_distribution<Eigen::Index> any_goal(n, total - 1);

  LdpProblem p;
  p.passive = Eigen::MatrixXd::Zero(total, total);
  p.cost = Eigen::VectorXd::Zero(total);
  for (Eigen::Index g = n; g < total; ++g) {
    p.goals.push_back(g);
    p.passive(g, g) = 1.0;
  }

  const auto order = shuffled(static_cast<std::size_t>(n), rng);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto from = static_cast<Eigen::Index>(order[rank]);
    p.cost(from) = cost(rng);
    Eigen::Index anchor = any_goal(rng);
    if (rank > 0) {
      std::uniform_int_distribution<std::size_t> earlier(0, rank);
      const std::size_t pick = earlier(rng);
      if (pick < rank) anchor = static_cast<Eigen::Index>(order[pick]);
    }
    p.passive(anchor, from) += weight(rng);
    const int others = extra(rng);
    for (int k = 0; k < others; ++k) p.passive(any_state(rng), from) += weight(rng);
    p.passive.col(from) /= p.passive.col(from).sum();
  }
  return p;
}

}  // namespace conebellman::instances
