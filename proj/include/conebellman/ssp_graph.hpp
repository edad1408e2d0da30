#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "conebellman/ssp.hpp"

namespace conebellman {

/// One action available at node `from`: pay `cost`, then move to to[k] with
/// probability prob[k].
struct SspEdge {
  std::size_t from = 0;
  std::vector<std::size_t> to;
  std::vector<double> prob;
  double cost = 0.0;
};

/// Shortest-path graph with absorbing, cost-free goal nodes. `s` holds the
/// per-step cost of sitting at each node; entries for goals are ignored.
struct SspGraph {
  std::size_t nodes = 0;
  std::vector<std::size_t> goals;
  std::vector<SspEdge> edges;
  Eigen::VectorXd s;

  [[nodiscard]] bool is_goal(std::size_t node) const;
  /// Every edge has a single successor.
  [[nodiscard]] bool is_deterministic() const;
  void validate() const;
};

/// A graph lowered to matrix form. Goal nodes are dropped; every other node
/// becomes a state that keeps its mass (A = I) unless an action moves it.
/// Each edge is one input: column -e_from + Σ prob·e_to over non-goal
/// successors, with budget E = I so a node can move at most its own mass.
struct CompiledSspGraph {
  SspProblem problem;
  std::vector<std::size_t> state_nodes;       // state -> node
  std::vector<std::ptrdiff_t> node_states;    // node -> state, -1 for goals
  std::vector<std::size_t> input_edges;       // input column -> edge index
};

CompiledSspGraph compile(const SspGraph& graph);

/// Per node, the edge an optimal gain spends its budget on, or -1.
std::vector<std::ptrdiff_t> policy_from_gain(const CompiledSspGraph& compiled,
                                             const Eigen::MatrixXd& gain);

/// Expands a state-indexed value vector to all nodes (goals get 0).
Eigen::VectorXd values_by_node(const CompiledSspGraph& compiled,
                               const Eigen::VectorXd& lambda);

}  // namespace conebellman
