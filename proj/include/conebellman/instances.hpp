#pragma once

// Seeded random problem generators for tests and benchmarks. All draws come
// from std::mt19937_64, so an (n, seed) pair always yields the same instance.

#include <cstddef>
#include <cstdint>

#include "conebellman/ldp.hpp"
#include "conebellman/lqr.hpp"
#include "conebellman/ssp_graph.hpp"

namespace conebellman::instances {

/// n non-goal nodes plus one goal (node n). Nodes are put in a random order
/// and each gets one action towards an earlier node or the goal, which makes
/// the goal reachable from everywhere; up to two further actions point
/// anywhere. Edge costs are uniform on [1, 10], s uniform on [0.01, 0.1].
/// Stochastic graphs give every action up to three successors, the
/// guaranteed action keeping at least 30% of its mass on its earlier node.
SspGraph random_ssp_graph(std::size_t n, std::uint64_t seed, bool deterministic);

/// A = V D Vᵀ with V a random orthogonal matrix and D block diagonal with
/// 2x2 rotation blocks and scalars whose moduli lie in [0.1, 1.2], so some
/// modes are usually unstable. B, Q - I/2 and R - I/2 come from Gaussian
/// factors; a dense Gaussian B is controllable with probability one.
LqrProblem random_lqr(Eigen::Index n, Eigen::Index m, std::uint64_t seed);

/// n non-goal states and one or two goals at the end. Each non-goal column
/// has a guaranteed successor earlier in a random order (or a goal) plus up
/// to three random successors, with weights uniform on [0.1, 1] normalized
/// to sum to 1. Costs are uniform on [0.1, 1].
LdpProblem random_ldp(Eigen::Index n, std::uint64_t seed);

}  // namespace conebellman::instances
