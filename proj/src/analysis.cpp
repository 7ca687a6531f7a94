#include "biasdyn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "biasdyn/errors.hpp"

namespace biasdyn {

namespace {

std::vector<double> filtered_neighbor_sum(const OpinionState& state, const BiasSet& biases,
                                          const Network& net, std::size_t agent) {
  const std::size_t k = state.alternatives();
  std::vector<double> s(k, 0.0);
  const auto bias = biases.row(agent);
  for (std::size_t j : net.neighbors(agent)) {
    const auto xj = state.row(j);
    for (std::size_t l = 0; l < k; ++l) s[l] += bias[l] * xj[l];
  }
  return s;
}

// Residual of a single agent without computing the full update.
double agent_residual(const OpinionState& state, std::span<const double> filtered,
                      std::size_t agent) {
  const auto xi = state.row(agent);
  double norm = 0.0;
  for (std::size_t l = 0; l < xi.size(); ++l) norm += xi[l] + filtered[l];
  double worst = 0.0;
  for (std::size_t l = 0; l < xi.size(); ++l) {
    worst = std::max(worst, std::abs((xi[l] + filtered[l]) / norm - xi[l]));
  }
  return worst;
}

}  // namespace

std::vector<double> fixed_point_residual(const OpinionState& state, const BiasSet& biases,
                                         const Network& net) {
  const OpinionState next = step(state, biases, net);
  std::vector<double> out(state.agents(), 0.0);
  for (std::size_t i = 0; i < state.agents(); ++i) {
    const auto a = next.row(i);
    const auto b = state.row(i);
    for (std::size_t l = 0; l < a.size(); ++l) out[i] = std::max(out[i], std::abs(a[l] - b[l]));
  }
  return out;
}

AgentFixedClass classify_fixed_agent(const OpinionState& state, const BiasSet& biases,
                                     const Network& net, std::size_t agent, double tol,
                                     double zero_tol) {
  check_shapes(state, biases, net);
  if (agent >= state.agents()) {
    throw RangeError(fmt::format("agent index {} out of range (n = {})", agent, state.agents()));
  }
  const auto s = filtered_neighbor_sum(state, biases, net, agent);
  const double residual = agent_residual(state, s, agent);
  if (residual >= tol) return fixed_class::NotFixed{residual};

  double norm = 0.0;
  for (double v : s) norm += v;
  if (norm < zero_tol) return fixed_class::Decoupled{norm};

  const auto xi = state.row(agent);
  double balance = 0.0;
  for (std::size_t l = 0; l < s.size(); ++l) balance = std::max(balance, std::abs(xi[l] - s[l] / norm));
  return fixed_class::Balanced{balance};
}

bool separates(const BiasSet& biases, std::span<const std::size_t> recessive) {
  const std::size_t k = biases.alternatives();
  std::vector<bool> in_l(k, false);
  for (std::size_t l : recessive) in_l.at(l) = true;
  if (std::count(in_l.begin(), in_l.end(), true) == static_cast<std::ptrdiff_t>(k)) return false;
  for (std::size_t i = 0; i < biases.agents(); ++i) {
    const auto r = biases.row(i);
    double max_l = -std::numeric_limits<double>::infinity();
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < k; ++l) {
      if (in_l[l]) {
        max_l = std::max(max_l, r[l]);
      } else {
        min_d = std::min(min_d, r[l]);
      }
    }
    if (!(max_l < min_d)) return false;
  }
  return true;
}

AltPartition recessive_set(const BiasSet& biases) {
  const std::size_t k = biases.alternatives();
  std::vector<bool> dominant(k, false);

  // Every agent's favourite alternatives are necessarily dominant.
  for (std::size_t i = 0; i < biases.agents(); ++i) {
    const auto r = biases.row(i);
    const double top = *std::max_element(r.begin(), r.end());
    for (std::size_t l = 0; l < k; ++l) {
      if (r[l] == top) dominant[l] = true;
    }
  }

  // Close under: l is dominant if some agent rates it at least as high as
  // some already-dominant alternative.
  std::vector<double> min_dominant(biases.agents());
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < biases.agents(); ++i) {
      const auto r = biases.row(i);
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < k; ++l) {
        if (dominant[l]) m = std::min(m, r[l]);
      }
      min_dominant[i] = m;
    }
    for (std::size_t l = 0; l < k; ++l) {
      if (dominant[l]) continue;
      for (std::size_t i = 0; i < biases.agents(); ++i) {
        if (biases(i, l) >= min_dominant[i]) {
          dominant[l] = true;
          changed = true;
          break;
        }
      }
    }
  }

  AltPartition out;
  for (std::size_t l = 0; l < k; ++l) (dominant[l] ? out.dominant : out.recessive).push_back(l);
  return out;
}

double lyapunov_value(const OpinionState& state, const AltPartition& partition) {
  if (partition.dominant.size() + partition.recessive.size() != state.alternatives()) {
    throw ShapeError("partition does not cover the state's alternatives");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < state.agents(); ++i) {
    double mass = 0.0;
    for (std::size_t l : partition.recessive) mass += state(i, l);
    v = std::max(v, mass);
  }
  return v;
}

LyapunovReport check_lyapunov_decrease(const Trajectory& traj, const AltPartition& partition,
                                       double floor) {
  LyapunovReport report;
  report.values.reserve(traj.states.size());
  for (const auto& s : traj.states) report.values.push_back(lyapunov_value(s, partition));
  if (!report.values.empty()) report.starts_at_one = report.values.front() == 1.0;
  for (std::size_t s = 1; s < report.values.size(); ++s) {
    const double prev = report.values[s - 1];
    if (prev > floor && prev < 1.0 && !(report.values[s] < prev)) {
      report.first_violation = s;
      break;
    }
  }
  return report;
}

Bias2 to_bias2(std::span<const double> r) {
  if (r.size() != 2) {
    throw UnsupportedDimensionError(
        fmt::format("two-agent analysis needs k = 2 bias vectors, got k = {}", r.size()));
  }
  if (!(r[0] >= 0.0) || !(r[1] >= 0.0)) throw DomainError("bias entries must be nonnegative");
  return {r[0], r[1]};
}

TwoAgentClass two_agent_fixed_points(std::span<const double> r1, std::span<const double> r2,
                                     double equality_tol) {
  const Bias2 b1 = to_bias2(r1);
  const Bias2 b2 = to_bias2(r2);
  TwoAgentClass out{TwoAgentKind::Continuum, b1.alpha * b2.alpha, b1.beta * b2.beta};
  const double gap = out.alpha_product - out.beta_product;
  if (std::abs(gap) <= equality_tol) {
    out.kind = TwoAgentKind::Continuum;
  } else if (gap > 0.0) {
    out.kind = TwoAgentKind::StableAllOne;
  } else {
    out.kind = TwoAgentKind::StableAllZero;
  }
  return out;
}

std::array<double, 2> two_agent_map(const Bias2& r1, const Bias2& r2, double x1, double x2) {
  return {(x1 + r1.alpha * x2) / (1.0 + r1.beta + (r1.alpha - r1.beta) * x2),
          (x2 + r2.alpha * x1) / (1.0 + r2.beta + (r2.alpha - r2.beta) * x1)};
}

std::array<double, 2> two_agent_fixed_point_residuals(const Bias2& r1, const Bias2& r2,
                                                      double x1, double x2) {
  return {x1 * (r1.alpha * x2 + r1.beta * (1.0 - x2)) - r1.alpha * x2,
          x2 * (r2.alpha * x1 + r2.beta * (1.0 - x1)) - r2.alpha * x1};
}

double continuum_fixed_point(std::span<const double> r1, std::span<const double> r2,
                             double x2_star, double equality_tol) {
  const Bias2 b1 = to_bias2(r1);
  const Bias2 b2 = to_bias2(r2);
  if (!(x2_star >= 0.0 && x2_star <= 1.0)) throw DomainError("x2* must lie in [0, 1]");
  const double gap = b1.alpha * b2.alpha - b1.beta * b2.beta;
  if (std::abs(gap) > equality_tol) {
    throw DomainError(fmt::format(
        "biases do not admit a continuum of fixed points (alpha1*alpha2 - beta1*beta2 = {:.3e})",
        gap));
  }
  const double denom = b1.alpha * x2_star + b1.beta * (1.0 - x2_star);
  if (denom == 0.0) {
    throw DegenerateInputError("alpha1 * x2* + beta1 * (1 - x2*) is zero");
  }
  const double x1_star = b1.alpha * x2_star / denom;

  // With an exact product match only rounding remains; a nonzero tolerance
  // admits an extra x2 (1 - x2) |gap| / denom in the second condition.
  const auto res = two_agent_fixed_point_residuals(b1, b2, x1_star, x2_star);
  const double allowed = 1e-12 + std::abs(gap) * x2_star * (1.0 - x2_star) / denom;
  if (std::abs(res[0]) > 1e-12 || std::abs(res[1]) > allowed) {
    throw NumericError(fmt::format("continuum fixed point check failed (residuals {:.3e}, {:.3e})",
                                   res[0], res[1]));
  }
  return x1_star;
}

bool schur_stable_2x2(const Matrix2& m) {
  const double a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
  if (!(a >= 0.0 && b >= 0.0 && c >= 0.0 && d >= 0.0)) {
    throw DomainError("Schur test requires a nonnegative matrix");
  }
  return a + d < 2.0 && a + d + b * c < 1.0 + a * d;
}

Matrix2 jacobian_origin_2agent(std::span<const double> r1, std::span<const double> r2) {
  const Bias2 b1 = to_bias2(r1);
  const Bias2 b2 = to_bias2(r2);
  return {{{1.0 / (1.0 + b1.beta), b1.alpha / (1.0 + b1.beta)},
           {b2.alpha / (1.0 + b2.beta), 1.0 / (1.0 + b2.beta)}}};
}

Matrix2 jacobian_ones_2agent(std::span<const double> r1, std::span<const double> r2) {
  const Bias2 b1 = to_bias2(r1);
  const Bias2 b2 = to_bias2(r2);
  const std::array<double, 2> s1{b1.beta, b1.alpha};
  const std::array<double, 2> s2{b2.beta, b2.alpha};
  return jacobian_origin_2agent(s1, s2);
}

Matrix finite_difference_jacobian(const VectorMap& map, std::span<const double> point, double h,
                                  const BoxDomain& domain) {
  if (!(h > 0.0)) throw DomainError("finite-difference step h must be positive");
  const std::size_t dim = point.size();
  const bool has_lower = !domain.lower.empty();
  const bool has_upper = !domain.upper.empty();
  if ((has_lower && domain.lower.size() != dim) || (has_upper && domain.upper.size() != dim)) {
    throw ShapeError("domain bounds do not match the point dimension");
  }

  auto eval = [&](std::span<const double> x) {
    auto y = map(x);
    for (double v : y) {
      if (!std::isfinite(v)) throw NumericError("map returned a non-finite value");
    }
    return y;
  };

  const std::vector<double> base(point.begin(), point.end());
  const std::vector<double> f0 = eval(base);
  Matrix jac(f0.size(), dim);

  for (std::size_t c = 0; c < dim; ++c) {
    auto shifted = [&](double offset) {
      std::vector<double> x = base;
      x[c] += offset;
      auto y = eval(x);
      if (y.size() != f0.size()) throw ShapeError("map output size changed between evaluations");
      return y;
    };
    const bool near_lower = has_lower && base[c] - domain.lower[c] < h;
    const bool near_upper = has_upper && domain.upper[c] - base[c] < h;

    if (near_lower && !near_upper) {
      const auto f1 = shifted(h);
      const auto f2 = shifted(2.0 * h);
      for (std::size_t r = 0; r < f0.size(); ++r) {
        jac(r, c) = (-3.0 * f0[r] + 4.0 * f1[r] - f2[r]) / (2.0 * h);
      }
    } else if (near_upper && !near_lower) {
      const auto f1 = shifted(-h);
      const auto f2 = shifted(-2.0 * h);
      for (std::size_t r = 0; r < f0.size(); ++r) {
        jac(r, c) = (3.0 * f0[r] - 4.0 * f1[r] + f2[r]) / (2.0 * h);
      }
    } else if (near_lower && near_upper) {
      throw DomainError("domain is narrower than the finite-difference stencil");
    } else {
      const auto fp = shifted(h);
      const auto fm = shifted(-h);
      for (std::size_t r = 0; r < f0.size(); ++r) jac(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
  }
  return jac;
}

}  // namespace biasdyn
