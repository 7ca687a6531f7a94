#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "biasdyn/experiments.hpp"
#include "biasdyn/model.hpp"
#include "biasdyn/netgen.hpp"

namespace biasdyn {

struct EdgeListSource {
  std::filesystem::path path;
};
using GraphSource = std::variant<WattsStrogatzParams, EdgeListSource>;

// One row is shared by every agent; otherwise one row per agent.
struct InlineBiases {
  std::vector<std::vector<double>> rows;
};
// Members of one detected community get `minority`; unset id means the
// smallest community.
struct CommunityBiases {
  std::vector<double> majority;
  std::vector<double> minority;
  std::optional<std::size_t> minority_community;
};
struct RandomBiases {
  std::vector<double> majority;
  std::vector<double> minority;
  std::size_t minority_count = 0;
};
struct CsvBiases {
  std::filesystem::path path;
};
using BiasSource = std::variant<InlineBiases, CommunityBiases, RandomBiases, CsvBiases>;

struct UniformOpinions {};
struct CsvOpinions {
  std::filesystem::path path;
};
using OpinionSource = std::variant<UniformOpinions, CsvOpinions>;

// A validated run description. With `scenario` set, only `seed`,
// `overrides` and `output_dir` apply; otherwise graph/biases/opinions/run
// describe a free-form simulation.
struct RunConfig {
  std::optional<Scenario> scenario;
  std::uint64_t seed = 0;
  ScenarioOverrides overrides;

  GraphSource graph = WattsStrogatzParams{};
  BiasSource biases = InlineBiases{};
  OpinionSource opinions = UniformOpinions{};
  RunOptions run;

  std::optional<std::filesystem::path> output_dir;
};

// Parses the YAML config at `path`. Relative file references resolve against
// the config's directory and must exist. Throws ConfigFileError (unreadable),
// ConfigSyntaxError (not valid YAML) or ConfigValueError (unknown key, wrong
// type, out-of-range value); the latter two carry the line number.
RunConfig parse_config(const std::filesystem::path& path);

// Same, from YAML text; `base_dir` anchors relative paths.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

// Builds the inputs a config describes and runs the dynamics.
ExperimentResult execute(const RunConfig& config);

}  // namespace biasdyn
