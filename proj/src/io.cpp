#include "biasdyn/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "biasdyn/errors.hpp"

namespace biasdyn::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_double(const std::string& text, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("'{}' is not a number", text), line);
  }
  return v;
}

std::size_t parse_index(const std::string& text, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(fmt::format("'{}' is not a nonnegative integer", text), line);
  }
  return v;
}

std::string header(std::string_view lead, std::string_view prefix, std::size_t k) {
  std::string h(lead);
  for (std::size_t l = 1; l <= k; ++l) h += fmt::format(",{}{}", prefix, l);
  return h;
}

// Reads "agent,<prefix>1,...,<prefix>k" tables into a matrix.
Matrix read_agent_table(const std::filesystem::path& path, std::string_view prefix) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  strip_cr(line);
  const auto head = split(line, ',');
  if (head.size() < 2 || head[0] != "agent") {
    throw ParseError(fmt::format("expected header 'agent,{}1,...'", prefix), 1);
  }
  const std::size_t k = head.size() - 1;
  if (line != header("agent", prefix, k)) {
    throw ParseError(fmt::format("expected header '{}'", header("agent", prefix, k)), 1);
  }
  std::vector<std::vector<double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != k + 1) {
      throw ParseError(fmt::format("expected {} fields, found {}", k + 1, cells.size()), lineno);
    }
    if (parse_index(cells[0], lineno) != rows.size()) {
      throw ParseError(fmt::format("expected agent {}", rows.size()), lineno);
    }
    std::vector<double> row(k);
    for (std::size_t l = 0; l < k; ++l) row[l] = parse_double(cells[l + 1], lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no data rows", lineno);
  return Matrix::from_rows(rows);
}

void write_agent_table(const Matrix& m, std::string_view prefix,
                       const std::filesystem::path& path) {
  auto out = open_out(path);
  out << header("agent", prefix, m.cols()) << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << i;
    for (double v : m.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  if (traj.states.empty()) throw DomainError("trajectory has no states");
  auto out = open_out(path);
  const std::size_t k = traj.states.front().alternatives();
  out << header("t,agent", "x", k) << '\n';
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const auto& state = traj.states[s];
    const std::size_t t = s < traj.times.size() ? traj.times[s] : s;
    for (std::size_t i = 0; i < state.agents(); ++i) {
      out << t << ',' << i;
      for (double v : state.row(i)) out << ',' << format_double(v);
      out << '\n';
    }
  }
  finish(out, path);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 1);
  strip_cr(line);
  const auto head = split(line, ',');
  if (head.size() < 3 || line != header("t,agent", "x", head.size() - 2)) {
    throw ParseError("expected header 't,agent,x1,...,xk'", 1);
  }
  const std::size_t k = head.size() - 2;

  Trajectory traj;
  std::vector<std::vector<double>> rows;
  std::optional<std::size_t> current_t;
  auto flush = [&] {
    if (!rows.empty()) {
      traj.states.push_back(OpinionState::from_rows(rows));
      traj.times.push_back(*current_t);
      rows.clear();
    }
  };

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != k + 2) {
      throw ParseError(fmt::format("expected {} fields, found {}", k + 2, cells.size()), lineno);
    }
    const std::size_t t = parse_index(cells[0], lineno);
    const std::size_t agent = parse_index(cells[1], lineno);
    if (current_t && t != *current_t) {
      if (t < *current_t) throw ParseError("rows are not ordered by t", lineno);
      flush();
    }
    current_t = t;
    if (agent != rows.size()) throw ParseError(fmt::format("expected agent {}", rows.size()), lineno);
    std::vector<double> row(k);
    for (std::size_t l = 0; l < k; ++l) row[l] = parse_double(cells[l + 2], lineno);
    rows.push_back(std::move(row));
  }
  flush();
  if (traj.states.empty()) throw ParseError("no data rows", lineno);
  traj.steps = traj.times.back();
  return traj;
}

void write_opinion_csv(const OpinionState& state, const std::filesystem::path& path) {
  write_agent_table(state.values(), "x", path);
}

OpinionState read_opinion_csv(const std::filesystem::path& path) {
  return OpinionState(read_agent_table(path, "x"));
}

void write_bias_csv(const BiasSet& biases, const std::filesystem::path& path) {
  write_agent_table(biases.vectors(), "r", path);
}

BiasSet read_bias_csv(const std::filesystem::path& path) {
  return BiasSet(read_agent_table(path, "r"));
}

void write_edge_list(const Network& net, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (const auto& [u, v] : net.edges()) out << u << ' ' << v << '\n';
  finish(out, path);
}

Network read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n) {
  auto in = open_in(path);
  std::vector<Edge> edges;
  std::size_t max_node = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ' ');
    if (cells.size() != 2) throw ParseError("expected 'u v'", lineno);
    const std::size_t u = parse_index(cells[0], lineno);
    const std::size_t v = parse_index(cells[1], lineno);
    max_node = std::max({max_node, u, v});
    edges.emplace_back(u, v);
  }
  const std::size_t nodes = n.value_or(edges.empty() ? 1 : max_node + 1);
  if (!edges.empty() && max_node >= nodes) {
    throw ShapeError(fmt::format("edge list references node {} but n = {}", max_node, nodes));
  }
  return Network(nodes, edges);
}

void write_community_csv(const CommunityPartition& partition,
                         const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "agent,community\n";
  for (std::size_t i = 0; i < partition.assignment.size(); ++i) {
    out << i << ',' << partition.assignment[i] << '\n';
  }
  finish(out, path);
}

std::vector<std::array<double, 2>> ternary_project(const OpinionState& state) {
  if (state.alternatives() != 3) {
    throw UnsupportedDimensionError(
        fmt::format("ternary projection needs k = 3, got k = {}", state.alternatives()));
  }
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<std::array<double, 2>> out(state.agents());
  for (std::size_t i = 0; i < state.agents(); ++i) {
    out[i] = {state(i, 1) + 0.5 * state(i, 2), h * state(i, 2)};
  }
  return out;
}

void write_ternary_csv(const OpinionState& state, const std::filesystem::path& path) {
  const auto points = ternary_project(state);
  auto out = open_out(path);
  out << "agent,x,y\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << i << ',' << format_double(points[i][0]) << ',' << format_double(points[i][1]) << '\n';
  }
  finish(out, path);
}

void write_summary(const ExperimentResult& result, const std::filesystem::path& path) {
  const auto& traj = result.trajectory;
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "scenario" << YAML::Value << result.scenario;
  e << YAML::Key << "seed" << YAML::Value << result.seed;
  e << YAML::Key << "converged" << YAML::Value << traj.converged;
  e << YAML::Key << "steps" << YAML::Value << traj.steps;
  e << YAML::Key << "final_residual" << YAML::Value << traj.final_residual;
  e << YAML::Key << "agents" << YAML::Value << traj.final_state().agents();
  e << YAML::Key << "alternatives" << YAML::Value << traj.final_state().alternatives();
  e << YAML::Key << "snapshots" << YAML::Value << traj.states.size();
  e << YAML::Key << "metrics" << YAML::Value << YAML::BeginMap;
  for (const auto& [name, value] : result.metrics) e << YAML::Key << name << YAML::Value << value;
  e << YAML::EndMap;
  e << YAML::Key << "cluster_histogram" << YAML::Value << YAML::Flow << result.cluster_histogram;
  if (result.partition_used) {
    e << YAML::Key << "community_sizes" << YAML::Value << YAML::Flow
      << result.partition_used->sizes;
  }
  e << YAML::EndMap;
  if (!e.good()) throw IoError(fmt::format("summary emitter failed: {}", e.GetLastError()));

  auto out = open_out(path);
  out << e.c_str() << '\n';
  finish(out, path);
}

void write_result_bundle(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  write_trajectory_csv(result.trajectory, dir / "trajectory.csv");
  write_summary(result, dir / "summary.yaml");
  write_edge_list(result.network, dir / "graph.edges");
  write_bias_csv(result.biases, dir / "biases.csv");
  write_opinion_csv(result.trajectory.final_state(), dir / "final_opinions.csv");
  if (result.partition_used) write_community_csv(*result.partition_used, dir / "communities.csv");
  if (result.trajectory.final_state().alternatives() == 3) {
    write_ternary_csv(result.trajectory.final_state(), dir / "ternary.csv");
  }
}

}  // namespace biasdyn::io
