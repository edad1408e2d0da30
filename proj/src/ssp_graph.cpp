#include "conebellman/ssp_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "conebellman/errors.hpp"

namespace conebellman {

namespace {

constexpr double kProbabilityTol = 1e-12;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidProblem, what);
}

}  // namespace

bool SspGraph::is_goal(std::size_t node) const {
  return std::find(goals.begin(), goals.end(), node) != goals.end();
}

bool SspGraph::is_deterministic() const {
  return std::all_of(edges.begin(), edges.end(),
                     [](const SspEdge& e) { return e.to.size() == 1; });
}

void SspGraph::validate() const {
  if (nodes == 0) invalid("graph has no nodes");
  if (goals.empty()) invalid("graph has no goal node");
  for (const auto g : goals) {
    if (g >= nodes) invalid("goal " + std::to_string(g) + " out of range");
  }
  if (static_cast<std::size_t>(s.size()) != nodes) {
    throw Error(ErrorCode::kShapeMismatch, "s needs one entry per node");
  }
  if (goals.size() == nodes) invalid("every node is a goal");
  for (std::size_t node = 0; node < nodes; ++node) {
    if (!is_goal(node) && !(s(static_cast<Eigen::Index>(node)) > 0.0)) {
      invalid("s must be positive at non-goal node " + std::to_string(node));
    }
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const std::string where = "edge " + std::to_string(k) + ": ";
    if (e.from >= nodes) invalid(where + "source out of range");
    if (is_goal(e.from)) invalid(where + "goal nodes are absorbing and take no actions");
    if (e.to.empty()) invalid(where + "no successor");
    if (e.prob.size() != e.to.size()) invalid(where + "prob and to differ in length");
    if (!(e.cost >= 0.0) || !std::isfinite(e.cost)) invalid(where + "cost must be >= 0");
    double total = 0.0;
    for (std::size_t j = 0; j < e.to.size(); ++j) {
      if (e.to[j] >= nodes) invalid(where + "successor out of range");
      if (!(e.prob[j] >= 0.0)) invalid(where + "negative probability");
      total += e.prob[j];
    }
    if (std::abs(total - 1.0) > kProbabilityTol) invalid(where + "probabilities must sum to 1");
  }
}

CompiledSspGraph compile(const SspGraph& graph) {
  graph.validate();
  CompiledSspGraph out;
  out.node_states.assign(graph.nodes, -1);
  for (std::size_t node = 0; node < graph.nodes; ++node) {
    if (!graph.is_goal(node)) {
      out.node_states[node] = static_cast<std::ptrdiff_t>(out.state_nodes.size());
      out.state_nodes.push_back(node);
    }
  }
  const auto n = static_cast<Eigen::Index>(out.state_nodes.size());

  // Inputs are grouped by source state, preserving edge order within a state.
  std::vector<std::vector<std::size_t>> by_state(out.state_nodes.size());
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    by_state[static_cast<std::size_t>(out.node_states[graph.edges[k].from])].push_back(k);
  }
  auto& p = out.problem;
  p.block_sizes.reserve(by_state.size());
  for (const auto& edges : by_state) {
    p.block_sizes.push_back(static_cast<Eigen::Index>(edges.size()));
    out.input_edges.insert(out.input_edges.end(), edges.begin(), edges.end());
  }

  const auto m = static_cast<Eigen::Index>(out.input_edges.size());
  p.A = Eigen::MatrixXd::Identity(n, n);
  p.E = Eigen::MatrixXd::Identity(n, n);
  p.B = Eigen::MatrixXd::Zero(n, m);
  p.r.resize(m);
  p.s.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.s(i) = graph.s(static_cast<Eigen::Index>(out.state_nodes[static_cast<std::size_t>(i)]));
  }
  for (Eigen::Index col = 0; col < m; ++col) {
    const auto& e = graph.edges[out.input_edges[static_cast<std::size_t>(col)]];
    p.r(col) = e.cost;
    p.B(out.node_states[e.from], col) -= 1.0;
    for (std::size_t j = 0; j < e.to.size(); ++j) {
      const auto state = out.node_states[e.to[j]];
      if (state >= 0) p.B(state, col) += e.prob[j];
    }
  }
  return out;
}

std::vector<std::ptrdiff_t> policy_from_gain(const CompiledSspGraph& compiled,
                                             const Eigen::MatrixXd& gain) {
  std::vector<std::ptrdiff_t> policy(compiled.node_states.size(), -1);
  for (Eigen::Index col = 0; col < gain.rows(); ++col) {
    const auto edge = compiled.input_edges[static_cast<std::size_t>(col)];
    for (Eigen::Index state = 0; state < gain.cols(); ++state) {
      if (gain(col, state) > 0.0) {
        policy[compiled.state_nodes[static_cast<std::size_t>(state)]] =
            static_cast<std::ptrdiff_t>(edge);
      }
    }
  }
  return policy;
}

Eigen::VectorXd values_by_node(const CompiledSspGraph& compiled,
                               const Eigen::VectorXd& lambda) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(compiled.node_states.size()));
  for (std::size_t i = 0; i < compiled.state_nodes.size(); ++i) {
    out(static_cast<Eigen::Index>(compiled.state_nodes[i])) =
        lambda(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace conebellman
