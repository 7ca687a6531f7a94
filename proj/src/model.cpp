#include "biasdyn/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "biasdyn/errors.hpp"

namespace biasdyn {

void check_shapes(const OpinionState& state, const BiasSet& biases, const Network& net) {
  if (biases.agents() != state.agents() || biases.alternatives() != state.alternatives()) {
    throw ShapeError(fmt::format("biases are {}x{} but the state is {}x{}", biases.agents(),
                                 biases.alternatives(), state.agents(), state.alternatives()));
  }
  if (net.size() != state.agents()) {
    throw ShapeError(fmt::format("network has {} nodes but the state has {} agents", net.size(),
                                 state.agents()));
  }
}

OpinionState step(const OpinionState& state, const BiasSet& biases, const Network& net) {
  check_shapes(state, biases, net);
  const std::size_t n = state.agents();
  const std::size_t k = state.alternatives();
  Matrix next(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = next.row(i);
    const auto bias = biases.row(i);
    for (std::size_t j : net.neighbors(i)) {
      const auto xj = state.row(j);
      for (std::size_t l = 0; l < k; ++l) out[l] += bias[l] * xj[l];
    }
    const auto xi = state.row(i);
    double norm = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      out[l] += xi[l];
      norm += out[l];
    }
    for (double& v : out) v /= norm;
  }
  return OpinionState(std::move(next));
}

OpinionState degroot_step(const OpinionState& state, const Network& net) {
  if (net.size() != state.agents()) {
    throw ShapeError(fmt::format("network has {} nodes but the state has {} agents", net.size(),
                                 state.agents()));
  }
  const std::size_t n = state.agents();
  const std::size_t k = state.alternatives();
  Matrix next(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    auto out = next.row(i);
    const auto xi = state.row(i);
    std::copy(xi.begin(), xi.end(), out.begin());
    for (std::size_t j : net.neighbors(i)) {
      const auto xj = state.row(j);
      for (std::size_t l = 0; l < k; ++l) out[l] += xj[l];
    }
    const double count = 1.0 + static_cast<double>(net.degree(i));
    for (double& v : out) v /= count;
  }
  return OpinionState(std::move(next));
}

double max_row_change(const OpinionState& a, const OpinionState& b) {
  if (a.agents() != b.agents() || a.alternatives() != b.alternatives()) {
    throw ShapeError("states differ in shape");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.agents(); ++i) {
    double d = 0.0;
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    for (std::size_t l = 0; l < ra.size(); ++l) d += std::abs(ra[l] - rb[l]);
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<std::size_t> frozen_agents(const BiasSet& biases) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < biases.agents(); ++i) {
    const auto r = biases.row(i);
    if (std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; })) out.push_back(i);
  }
  return out;
}

Trajectory run(const OpinionState& initial, const BiasSet& biases, const Network& net,
               const RunOptions& options) {
  if (options.max_steps < 1) throw DomainError("max_steps must be at least 1");
  if (!(options.tol >= 0.0)) throw DomainError("tol must be nonnegative");
  if (options.stride < 1) throw DomainError("stride must be at least 1");
  check_shapes(initial, biases, net);

  if (const auto frozen = frozen_agents(biases); !frozen.empty()) {
    spdlog::warn("{} agent(s) have an all-zero bias row and will keep their initial opinion",
                 frozen.size());
  }

  Trajectory traj;
  traj.states.push_back(initial);
  traj.times.push_back(0);

  OpinionState current = initial;
  for (std::size_t t = 1; t <= options.max_steps; ++t) {
    OpinionState next = step(current, biases, net);
    traj.final_residual = max_row_change(next, current);
    traj.steps = t;
    current = std::move(next);
    traj.converged = traj.final_residual < options.tol;
    if (traj.converged || t % options.stride == 0 || t == options.max_steps) {
      traj.states.push_back(current);
      traj.times.push_back(t);
    }
    if (traj.converged) break;
  }
  spdlog::debug("run finished after {} steps, residual {:.3e}, converged={}", traj.steps,
                traj.final_residual, traj.converged);
  return traj;
}

}  // namespace biasdyn
