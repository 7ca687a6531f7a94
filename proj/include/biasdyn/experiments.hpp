#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "biasdyn/model.hpp"
#include "biasdyn/netgen.hpp"
#include "biasdyn/types.hpp"

namespace biasdyn {

enum class Scenario { Fig1a, Fig1b, Fig1c, Fig2Correlated, Fig2Random };

std::string_view scenario_name(Scenario s);
// Throws ConfigValueError for an unknown name.
Scenario parse_scenario(std::string_view name);
std::vector<Scenario> all_scenarios();

inline constexpr std::array<double, 3> kMajorityBias{0.8, 0.09, 0.11};
inline constexpr std::array<double, 3> kMinorityBias{0.11, 0.09, 0.8};
// fig2_random assigns the minority bias to 52 of every 500 agents.
inline constexpr std::size_t kReferenceMinorityCount = 52;
inline constexpr std::size_t kReferencePopulation = 500;

// Documented override keys. Unset fields keep the scenario defaults.
struct ScenarioOverrides {
  std::optional<std::size_t> n;
  std::optional<std::size_t> ring_degree;
  std::optional<double> rewire_p;
  std::optional<double> tol;
  std::optional<std::size_t> max_steps;
  std::optional<std::size_t> stride;
  std::optional<double> x1_0;  // first opinion component of agent 1 (fig1 only)
  std::optional<double> x2_0;  // first opinion component of agent 2 (fig1 only)
};

// Builds overrides from string key/value pairs. Unknown keys and values that
// do not parse raise ConfigValueError naming the key.
ScenarioOverrides parse_overrides(const std::map<std::string, std::string>& entries);

struct ExperimentResult {
  std::string scenario;
  std::uint64_t seed = 0;
  Network network;
  BiasSet biases{Matrix(1, 1)};
  Trajectory trajectory;
  std::map<std::string, double> metrics;
  std::vector<std::size_t> cluster_histogram;  // agents per argmax alternative
  std::optional<CommunityPartition> partition_used;
  std::vector<bool> minority;  // agents carrying the minority bias (fig2)
};

// Runs one named scenario end to end and computes its metrics.
ExperimentResult run_scenario(Scenario scenario, std::uint64_t seed,
                              const ScenarioOverrides& overrides = {});

// Agents per argmax alternative; ties go to the lowest index.
std::vector<std::size_t> argmax_clusters(const OpinionState& state);

// Mean pairwise 1-norm distance between agents' opinions (0 for n = 1).
double dispersion(const OpinionState& state);

// Outcome metrics shared by scenario and free-form runs.
std::map<std::string, double> outcome_metrics(const OpinionState& final_state,
                                              const BiasSet& biases, const Network& net);

}  // namespace biasdyn
