#include "biasdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <yaml-cpp/yaml.h>

#include "biasdyn/errors.hpp"
#include "biasdyn/io.hpp"
#include "biasdyn/sampling.hpp"

namespace biasdyn {

namespace {

std::optional<std::size_t> line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return std::nullopt;
  return static_cast<std::size_t>(mark.line) + 1;
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
  throw ConfigValueError(what, field, line_of(node));
}

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

void expect_map(const YAML::Node& node, const std::string& field) {
  if (!node.IsMap()) fail(node, field, "expected a mapping");
}

void check_keys(const YAML::Node& node, const std::string& prefix,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kv.first, join(prefix, key), "unknown key");
    }
  }
}

// Exactly one key; returns it.
std::string single_choice(const YAML::Node& node, const std::string& field,
                          std::initializer_list<std::string_view> allowed) {
  expect_map(node, field);
  check_keys(node, field, allowed);
  if (node.size() != 1) {
    fail(node, field, fmt::format("expected exactly one of: {}", fmt::join(allowed, ", ")));
  }
  return node.begin()->first.as<std::string>();
}

std::string scalar(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) fail(node, field, "expected a scalar value");
  return node.Scalar();
}

double get_double(const YAML::Node& node, const std::string& field) {
  const std::string text = scalar(node, field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    fail(node, field, fmt::format("'{}' is not a finite number", text));
  }
  return v;
}

std::uint64_t get_u64(const YAML::Node& node, const std::string& field) {
  const std::string text = scalar(node, field);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(node, field, fmt::format("'{}' is not a nonnegative integer", text));
  }
  return v;
}

std::size_t get_size(const YAML::Node& node, const std::string& field) {
  return static_cast<std::size_t>(get_u64(node, field));
}

std::vector<double> get_vector(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() == 0) fail(node, field, "expected a nonempty list");
  std::vector<double> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const double v = get_double(node[i], field);
    if (v < 0.0) fail(node[i], field, "bias entries must be nonnegative");
    out.push_back(v);
  }
  return out;
}

std::filesystem::path get_path(const YAML::Node& node, const std::string& field,
                               const std::filesystem::path& base) {
  std::filesystem::path p = scalar(node, field);
  if (p.is_relative()) p = base / p;
  if (!std::filesystem::exists(p)) {
    fail(node, field, fmt::format("file '{}' does not exist", p.string()));
  }
  return p;
}

double nonneg(const YAML::Node& node, const std::string& field) {
  const double v = get_double(node, field);
  if (v < 0.0) fail(node, field, "must be nonnegative");
  return v;
}

std::size_t positive(const YAML::Node& node, const std::string& field) {
  const std::size_t v = get_size(node, field);
  if (v < 1) fail(node, field, "must be at least 1");
  return v;
}

double unit_interval(const YAML::Node& node, const std::string& field) {
  const double v = get_double(node, field);
  if (v < 0.0 || v > 1.0) fail(node, field, "must lie in [0, 1]");
  return v;
}

void parse_overrides_section(const YAML::Node& node, ScenarioOverrides& o) {
  expect_map(node, "overrides");
  check_keys(node, "overrides",
             {"n", "ring_degree", "rewire_p", "tol", "max_steps", "stride", "x1_0", "x2_0"});
  if (const auto v = node["n"]) o.n = positive(v, "overrides.n");
  if (const auto v = node["ring_degree"]) o.ring_degree = positive(v, "overrides.ring_degree");
  if (const auto v = node["rewire_p"]) o.rewire_p = unit_interval(v, "overrides.rewire_p");
  if (const auto v = node["tol"]) o.tol = nonneg(v, "overrides.tol");
  if (const auto v = node["max_steps"]) o.max_steps = positive(v, "overrides.max_steps");
  if (const auto v = node["stride"]) o.stride = positive(v, "overrides.stride");
  if (const auto v = node["x1_0"]) o.x1_0 = unit_interval(v, "overrides.x1_0");
  if (const auto v = node["x2_0"]) o.x2_0 = unit_interval(v, "overrides.x2_0");
}

GraphSource parse_graph(const YAML::Node& node, const std::filesystem::path& base) {
  const auto kind = single_choice(node, "graph", {"watts_strogatz", "edge_list"});
  const YAML::Node body = node[kind];
  if (kind == "edge_list") return EdgeListSource{get_path(body, "graph.edge_list", base)};

  WattsStrogatzParams p;
  expect_map(body, "graph.watts_strogatz");
  check_keys(body, "graph.watts_strogatz", {"n", "ring_degree", "rewire_p"});
  if (const auto v = body["n"]) p.n = positive(v, "graph.watts_strogatz.n");
  if (const auto v = body["ring_degree"]) {
    p.ring_degree = get_size(v, "graph.watts_strogatz.ring_degree");
    if (p.ring_degree < 2 || p.ring_degree % 2 != 0) {
      fail(v, "graph.watts_strogatz.ring_degree", "must be an even integer >= 2");
    }
  }
  if (const auto v = body["rewire_p"]) p.rewire_p = unit_interval(v, "graph.watts_strogatz.rewire_p");
  if (p.n <= p.ring_degree) fail(body, "graph.watts_strogatz.n", "must exceed ring_degree");
  return p;
}

BiasSource parse_biases(const YAML::Node& node, const std::filesystem::path& base) {
  const auto kind = single_choice(node, "biases", {"inline", "community", "random", "csv"});
  const YAML::Node body = node[kind];
  if (kind == "csv") return CsvBiases{get_path(body, "biases.csv", base)};
  if (kind == "inline") {
    if (!body.IsSequence() || body.size() == 0) fail(body, "biases.inline", "expected a list of rows");
    InlineBiases out;
    for (std::size_t i = 0; i < body.size(); ++i) {
      out.rows.push_back(get_vector(body[i], "biases.inline"));
      if (out.rows.back().size() != out.rows.front().size()) {
        fail(body[i], "biases.inline", "rows differ in length");
      }
    }
    return out;
  }

  const std::string field = "biases." + kind;
  expect_map(body, field);
  if (kind == "community") {
    check_keys(body, field, {"majority", "minority", "minority_community"});
  } else {
    check_keys(body, field, {"majority", "minority", "minority_count"});
  }
  if (!body["majority"]) fail(body, field + ".majority", "missing");
  if (!body["minority"]) fail(body, field + ".minority", "missing");
  auto majority = get_vector(body["majority"], field + ".majority");
  auto minority = get_vector(body["minority"], field + ".minority");
  if (majority.size() != minority.size()) {
    fail(body["minority"], field + ".minority", "length differs from majority");
  }
  if (kind == "community") {
    CommunityBiases out{std::move(majority), std::move(minority), std::nullopt};
    if (const auto v = body["minority_community"]) {
      if (!(v.IsScalar() && v.Scalar() == "smallest")) {
        out.minority_community = get_size(v, field + ".minority_community");
      }
    }
    return out;
  }
  if (!body["minority_count"]) fail(body, field + ".minority_count", "missing");
  return RandomBiases{std::move(majority), std::move(minority),
                      get_size(body["minority_count"], field + ".minority_count")};
}

OpinionSource parse_opinions(const YAML::Node& node, const std::filesystem::path& base) {
  const auto kind = single_choice(node, "opinions", {"uniform", "csv"});
  if (kind == "csv") return CsvOpinions{get_path(node[kind], "opinions.csv", base)};
  return UniformOpinions{};
}

RunOptions parse_run(const YAML::Node& node) {
  expect_map(node, "run");
  check_keys(node, "run", {"tol", "max_steps", "stride"});
  RunOptions r;
  if (const auto v = node["tol"]) r.tol = nonneg(v, "run.tol");
  if (const auto v = node["max_steps"]) r.max_steps = positive(v, "run.max_steps");
  if (const auto v = node["stride"]) r.stride = positive(v, "run.stride");
  return r;
}

RunConfig parse_root(const YAML::Node& root, const std::filesystem::path& base) {
  if (!root.IsMap()) throw ConfigSyntaxError("config must be a YAML mapping", {}, line_of(root));
  RunConfig cfg;
  const bool scenario_mode = static_cast<bool>(root["scenario"]);
  if (scenario_mode) {
    check_keys(root, "", {"scenario", "seed", "output", "overrides"});
    try {
      cfg.scenario = parse_scenario(scalar(root["scenario"], "scenario"));
    } catch (const ConfigValueError& e) {
      fail(root["scenario"], "scenario", e.what());
    }
    if (const auto v = root["overrides"]) parse_overrides_section(v, cfg.overrides);
  } else {
    check_keys(root, "", {"seed", "output", "graph", "biases", "opinions", "run"});
    if (!root["graph"]) throw ConfigValueError("missing section (or name a scenario)", "graph");
    if (!root["biases"]) throw ConfigValueError("missing section (or name a scenario)", "biases");
    cfg.graph = parse_graph(root["graph"], base);
    cfg.biases = parse_biases(root["biases"], base);
    if (const auto v = root["opinions"]) cfg.opinions = parse_opinions(v, base);
    if (const auto v = root["run"]) cfg.run = parse_run(v);
  }
  if (const auto v = root["seed"]) cfg.seed = get_u64(v, "seed");
  if (const auto v = root["output"]) {
    std::filesystem::path p = scalar(v, "output");
    cfg.output_dir = p.is_relative() ? base / p : p;
  }
  return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigSyntaxError(e.msg, {}, static_cast<std::size_t>(e.mark.line) + 1);
  }
  return parse_root(root, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigFileError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.parent_path());
}

namespace {

Network build_network(const RunConfig& cfg) {
  if (const auto* ws = std::get_if<WattsStrogatzParams>(&cfg.graph)) {
    return watts_strogatz(*ws, cfg.seed);
  }
  Network net = io::read_edge_list(std::get<EdgeListSource>(cfg.graph).path);
  require_connected(net);
  return net;
}

BiasSet build_biases(const RunConfig& cfg, const Network& net,
                     std::optional<CommunityPartition>& partition) {
  const std::size_t n = net.size();
  return std::visit(
      [&](const auto& src) -> BiasSet {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, InlineBiases>) {
          if (src.rows.size() == 1) return BiasSet::uniform(n, src.rows.front());
          if (src.rows.size() != n) {
            throw ConfigValueError(
                fmt::format("{} bias rows for {} agents", src.rows.size(), n), "biases.inline");
          }
          return BiasSet::from_rows(src.rows);
        } else if constexpr (std::is_same_v<T, CommunityBiases>) {
          partition = detect_communities(net);
          const std::size_t id = src.minority_community.value_or(partition->smallest());
          if (id >= partition->count()) {
            throw ConfigValueError(fmt::format("only {} communities detected", partition->count()),
                                   "biases.community.minority_community");
          }
          return assign_biases_by_community(*partition, src.majority, src.minority, id);
        } else if constexpr (std::is_same_v<T, RandomBiases>) {
          SeededRng rng(cfg.seed, StreamLabel::BiasAssignment);
          return assign_biases_random(n, src.majority, src.minority, src.minority_count, rng);
        } else {
          return io::read_bias_csv(src.path);
        }
      },
      cfg.biases);
}

}  // namespace

ExperimentResult execute(const RunConfig& config) {
  if (config.scenario) return run_scenario(*config.scenario, config.seed, config.overrides);

  ExperimentResult result;
  result.scenario = "custom";
  result.seed = config.seed;
  result.network = build_network(config);
  result.biases = build_biases(config, result.network, result.partition_used);

  const OpinionState initial = [&] {
    if (const auto* csv = std::get_if<CsvOpinions>(&config.opinions)) {
      return io::read_opinion_csv(csv->path);
    }
    SeededRng rng(config.seed, StreamLabel::Opinions);
    return sample_uniform_state(result.network.size(), result.biases.alternatives(), rng);
  }();
  check_shapes(initial, result.biases, result.network);

  result.trajectory = run(initial, result.biases, result.network, config.run);
  const OpinionState& last = result.trajectory.final_state();
  result.metrics = outcome_metrics(last, result.biases, result.network);
  result.cluster_histogram = argmax_clusters(last);
  result.minority.assign(result.network.size(), false);
  return result;
}

}  // namespace biasdyn
