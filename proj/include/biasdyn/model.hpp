#pragma once

#include <cstddef>
#include <vector>

#include "biasdyn/types.hpp"

namespace biasdyn {

struct RunOptions {
  std::size_t max_steps = 10000;
  double tol = 1e-10;
  // Keep every stride-th state. The initial and final states are always kept.
  std::size_t stride = 1;
};

// One synchronous update of the bias-filtered averaging dynamics:
//   x_i <- (x_i + sum_{j in N(i)} r_i .* x_j) / ||x_i + sum_{j in N(i)} r_i .* x_j||_1
// The denominator is at least 1 because x_i is on the simplex.
OpinionState step(const OpinionState& state, const BiasSet& biases, const Network& net);

// Iterates step until the largest per-agent 1-norm change drops below
// options.tol or options.max_steps updates have been applied.
Trajectory run(const OpinionState& initial, const BiasSet& biases, const Network& net,
               const RunOptions& options = {});

// Plain neighborhood averaging (x_i + sum_j x_j) / (1 + |N(i)|).
OpinionState degroot_step(const OpinionState& state, const Network& net);

// Largest 1-norm difference between corresponding rows.
double max_row_change(const OpinionState& a, const OpinionState& b);

// Agents whose bias row is identically zero; they never move.
std::vector<std::size_t> frozen_agents(const BiasSet& biases);

// Throws ShapeError unless state, biases and net describe the same n (and k).
void check_shapes(const OpinionState& state, const BiasSet& biases, const Network& net);

}  // namespace biasdyn
