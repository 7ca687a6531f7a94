#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "biasdyn/model.hpp"
#include "biasdyn/types.hpp"

namespace biasdyn {

// ---------------------------------------------------------------------------
// Fixed points of the n-agent dynamics
// ---------------------------------------------------------------------------

// ||step(state)_i - x_i||_inf for every agent i.
std::vector<double> fixed_point_residual(const OpinionState& state, const BiasSet& biases,
                                         const Network& net);

// Below this 1-norm the filtered neighbor sum counts as structurally zero.
inline constexpr double kDecoupledZeroTolerance = 1e-12;

namespace fixed_class {
struct NotFixed {
  double residual;
};
// The bias-filtered neighbor sum vanishes: the agent ignores its neighbors.
struct Decoupled {
  double filtered_norm;
};
// x_i equals the normalized bias-filtered neighbor sum. balance_error is
// ||x_i - s/||s||_1||_inf and is small whenever ||s||_1 is not tiny.
struct Balanced {
  double balance_error;
};
}  // namespace fixed_class

using AgentFixedClass =
    std::variant<fixed_class::NotFixed, fixed_class::Decoupled, fixed_class::Balanced>;

// Classifies agent `agent` at `state`: NotFixed when its residual is >= tol,
// otherwise Decoupled when ||sum_j r_i .* x_j||_1 < zero_tol, else Balanced.
AgentFixedClass classify_fixed_agent(const OpinionState& state, const BiasSet& biases,
                                     const Network& net, std::size_t agent, double tol,
                                     double zero_tol = kDecoupledZeroTolerance);

// ---------------------------------------------------------------------------
// Dominant / recessive alternatives and the Lyapunov function
// ---------------------------------------------------------------------------

// 0-based alternative indices, each list sorted ascending.
struct AltPartition {
  std::vector<std::size_t> dominant;
  std::vector<std::size_t> recessive;

  friend bool operator==(const AltPartition&, const AltPartition&) = default;
};

// Largest proper set L such that every agent strictly prefers every
// alternative outside L to every alternative inside it.
AltPartition recessive_set(const BiasSet& biases);

// True when every agent rates every recessive entry strictly below every
// dominant one.
bool separates(const BiasSet& biases, std::span<const std::size_t> recessive);

// V(x) = max_i sum_{l in L} x_i[l]; zero for empty L.
double lyapunov_value(const OpinionState& state, const AltPartition& partition);

struct LyapunovReport {
  std::vector<double> values;  // V at each recorded snapshot
  // V(x_0) == 1: outside the region where decrease is guaranteed.
  bool starts_at_one = false;
  // First snapshot index whose V did not drop strictly below its predecessor
  // while the predecessor was above `floor`.
  std::optional<std::size_t> first_violation;
};

// Evaluates V along a trajectory and checks strict decrease while V > floor.
LyapunovReport check_lyapunov_decrease(const Trajectory& traj, const AltPartition& partition,
                                       double floor = 1e-8);

// ---------------------------------------------------------------------------
// Two agents, two alternatives
// ---------------------------------------------------------------------------

// Bias vector [alpha, beta] of one agent when k = 2.
struct Bias2 {
  double alpha;
  double beta;
};

// Throws UnsupportedDimensionError unless the span has exactly two entries,
// DomainError for negative entries.
Bias2 to_bias2(std::span<const double> r);

using Matrix2 = std::array<std::array<double, 2>, 2>;

enum class TwoAgentKind { StableAllOne, StableAllZero, Continuum };

struct TwoAgentClass {
  TwoAgentKind kind;
  double alpha_product;  // alpha1 * alpha2
  double beta_product;   // beta1 * beta2
};

// Fixed-point structure of the two-agent system from the sign of
// alpha1*alpha2 - beta1*beta2. Products within equality_tol count as equal.
TwoAgentClass two_agent_fixed_points(std::span<const double> r1, std::span<const double> r2,
                                     double equality_tol = 0.0);

// First-component dynamics of the two-agent, two-alternative system.
std::array<double, 2> two_agent_map(const Bias2& r1, const Bias2& r2, double x1, double x2);

// Agent-1 coordinate of the continuum fixed point through x2_star. Requires
// alpha1*alpha2 == beta1*beta2 (within equality_tol).
double continuum_fixed_point(std::span<const double> r1, std::span<const double> r2,
                             double x2_star, double equality_tol = 0.0);

// Residuals of the two fixed-point conditions in cross-multiplied form:
//   x1 (a1 x2 + b1 (1 - x2)) - a1 x2  and  x2 (a2 x1 + b2 (1 - x1)) - a2 x1.
std::array<double, 2> two_agent_fixed_point_residuals(const Bias2& r1, const Bias2& r2,
                                                      double x1, double x2);

// Spectral radius < 1 for a nonnegative 2x2 matrix, via
// a + d < 2 and a + d + b c < 1 + a d.
bool schur_stable_2x2(const Matrix2& m);

// Jacobian of two_agent_map at (0, 0).
Matrix2 jacobian_origin_2agent(std::span<const double> r1, std::span<const double> r2);

// Jacobian at (1, 1) in the mirrored coordinates 1 - x: the origin Jacobian
// with the roles of alpha and beta swapped.
Matrix2 jacobian_ones_2agent(std::span<const double> r1, std::span<const double> r2);

// ---------------------------------------------------------------------------
// Numerical Jacobians
// ---------------------------------------------------------------------------

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

// Axis-aligned box the map is defined on; empty bounds mean unbounded.
struct BoxDomain {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Second-order finite differences. Coordinates within h of a box face use
// the one-sided three-point stencil pointing into the domain.
Matrix finite_difference_jacobian(const VectorMap& map, std::span<const double> point, double h,
                                  const BoxDomain& domain = {});

}  // namespace biasdyn
