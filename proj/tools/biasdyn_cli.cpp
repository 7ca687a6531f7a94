// biasdyn: command-line front end for simulation, analysis and the named
// experiments. Exit codes: 0 success, 1 usage/config error, 2 runtime error.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "biasdyn/analysis.hpp"
#include "biasdyn/config.hpp"
#include "biasdyn/errors.hpp"
#include "biasdyn/experiments.hpp"
#include "biasdyn/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

void setup_logging() {
  spdlog::set_default_logger(spdlog::stderr_color_mt("biasdyn"));
  spdlog::set_level(spdlog::level::warn);
  // BIASDYN_LOG takes spdlog level specs, e.g. "debug" or "info".
  if (const char* env = std::getenv("BIASDYN_LOG")) spdlog::cfg::helpers::load_levels(env);
}

std::string one_based(const std::vector<std::size_t>& idx) {
  std::vector<std::size_t> shifted;
  for (std::size_t i : idx) shifted.push_back(i + 1);
  return fmt::format("{{{}}}", fmt::join(shifted, ", "));
}

std::string matrix_text(const biasdyn::Matrix2& m) {
  return fmt::format("[[{:.10g}, {:.10g}], [{:.10g}, {:.10g}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
}

std::string_view kind_name(biasdyn::TwoAgentKind k) {
  switch (k) {
    case biasdyn::TwoAgentKind::StableAllOne:
      return "StableAllOne";
    case biasdyn::TwoAgentKind::StableAllZero:
      return "StableAllZero";
    case biasdyn::TwoAgentKind::Continuum:
      return "Continuum";
  }
  return "?";
}

void print_result_line(const biasdyn::ExperimentResult& r, const std::filesystem::path& out) {
  std::cout << fmt::format("{}: converged={} steps={} residual={:.3e} clusters=[{}] -> {}\n",
                           r.scenario, r.trajectory.converged, r.trajectory.steps,
                           r.trajectory.final_residual, fmt::join(r.cluster_histogram, ", "),
                           out.string());
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = biasdyn::parse_config(config_path);
  std::filesystem::path out;
  if (!out_dir.empty()) {
    out = out_dir;
  } else if (cfg.output_dir) {
    out = *cfg.output_dir;
  } else {
    throw biasdyn::ConfigValueError("no output directory (use --out or 'output:')", "output");
  }
  const auto result = biasdyn::execute(cfg);
  biasdyn::io::write_result_bundle(result, out);
  print_result_line(result, out);
  return kExitOk;
}

int cmd_experiment(const std::string& name, std::uint64_t seed, const std::string& out_dir,
                   const std::vector<std::string>& sets) {
  std::map<std::string, std::string> entries;
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw biasdyn::ConfigValueError("expected key=value", s);
    }
    entries[s.substr(0, eq)] = s.substr(eq + 1);
  }
  const auto scenario = biasdyn::parse_scenario(name);
  const auto overrides = biasdyn::parse_overrides(entries);
  const auto result = biasdyn::run_scenario(scenario, seed, overrides);
  biasdyn::io::write_result_bundle(result, out_dir);
  print_result_line(result, out_dir);
  return kExitOk;
}

int cmd_analyze(const std::string& state_path, const std::string& bias_path,
                const std::string& graph_path, double tol) {
  const auto state = biasdyn::io::read_opinion_csv(state_path);
  const auto biases = biasdyn::io::read_bias_csv(bias_path);
  const auto net = biasdyn::io::read_edge_list(graph_path, state.agents());
  biasdyn::check_shapes(state, biases, net);
  if (!biasdyn::is_connected(net)) spdlog::warn("graph is not connected");

  const auto residuals = biasdyn::fixed_point_residual(state, biases, net);
  std::cout << "agent,residual,class,detail\n";
  for (std::size_t i = 0; i < state.agents(); ++i) {
    const auto cls = biasdyn::classify_fixed_agent(state, biases, net, i, tol);
    std::string label, detail;
    if (const auto* nf = std::get_if<biasdyn::fixed_class::NotFixed>(&cls)) {
      label = "NotFixed";
      detail = fmt::format("{:.6e}", nf->residual);
    } else if (const auto* d = std::get_if<biasdyn::fixed_class::Decoupled>(&cls)) {
      label = "Decoupled";
      detail = fmt::format("{:.6e}", d->filtered_norm);
    } else {
      label = "Balanced";
      detail = fmt::format("{:.6e}", std::get<biasdyn::fixed_class::Balanced>(cls).balance_error);
    }
    std::cout << fmt::format("{},{:.6e},{},{}\n", i, residuals[i], label, detail);
  }
  const auto partition = biasdyn::recessive_set(biases);
  std::cout << "dominant_set: " << one_based(partition.dominant) << '\n';
  std::cout << "recessive_set: " << one_based(partition.recessive) << '\n';
  std::cout << fmt::format("lyapunov_value: {:.17g}\n", biasdyn::lyapunov_value(state, partition));
  return kExitOk;
}

int cmd_twoagent(const std::vector<double>& r1, const std::vector<double>& r2, double eq_tol) {
  const auto cls = biasdyn::two_agent_fixed_points(r1, r2, eq_tol);
  const auto j0 = biasdyn::jacobian_origin_2agent(r1, r2);
  const auto j1 = biasdyn::jacobian_ones_2agent(r1, r2);
  std::cout << fmt::format("r1: [{}]\nr2: [{}]\n", fmt::join(r1, ", "), fmt::join(r2, ", "));
  std::cout << fmt::format("alpha1*alpha2: {:.17g}\nbeta1*beta2: {:.17g}\n", cls.alpha_product,
                           cls.beta_product);
  std::cout << "class: " << kind_name(cls.kind) << '\n';
  std::cout << "J(0,0): " << matrix_text(j0) << '\n';
  std::cout << "schur_stable(J(0,0)): " << (biasdyn::schur_stable_2x2(j0) ? "true" : "false") << '\n';
  std::cout << "J(1,1): " << matrix_text(j1) << '\n';
  std::cout << "schur_stable(J(1,1)): " << (biasdyn::schur_stable_2x2(j1) ? "true" : "false") << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Opinion dynamics with per-agent bias filtering"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation described by a config file");
  simulate->add_option("--config", config_path, "YAML run config")->required();
  simulate->add_option("--out", out_dir, "Output directory (overrides 'output:')");

  std::string state_path, bias_path, graph_path;
  double analyze_tol = 1e-10;
  auto* analyze = app.add_subcommand("analyze", "Fixed-point diagnostics for a state");
  analyze->add_option("--state", state_path, "Opinion CSV (agent,x1,...,xk)")->required();
  analyze->add_option("--biases", bias_path, "Bias CSV (agent,r1,...,rk)")->required();
  analyze->add_option("--graph", graph_path, "Edge list")->required();
  analyze->add_option("--tol", analyze_tol, "Residual threshold for a fixed point");

  std::string scenario;
  std::uint64_t seed = 0;
  std::string exp_out;
  std::vector<std::string> sets;
  auto* experiment = app.add_subcommand("experiment", "Run a named scenario");
  experiment->add_option("name", scenario, "fig1a|fig1b|fig1c|fig2_correlated|fig2_random")
      ->required();
  experiment->add_option("--seed", seed, "Experiment seed");
  experiment->add_option("--out", exp_out, "Output directory")->required();
  experiment->add_option("--set", sets, "Override key=value (n, ring_degree, rewire_p, tol, "
                                        "max_steps, stride, x1_0, x2_0)");

  std::vector<double> r1, r2;
  double eq_tol = 0.0;
  auto* twoagent = app.add_subcommand("twoagent", "Two-agent, two-option fixed-point analysis");
  twoagent->add_option("--r1", r1, "Agent 1 bias a,b")->delimiter(',')->expected(2)->required();
  twoagent->add_option("--r2", r2, "Agent 2 bias c,d")->delimiter(',')->expected(2)->required();
  twoagent->add_option("--equality-tol", eq_tol, "Tolerance for alpha1*alpha2 == beta1*beta2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(config_path, out_dir);
    if (*analyze) return cmd_analyze(state_path, bias_path, graph_path, analyze_tol);
    if (*experiment) return cmd_experiment(scenario, seed, exp_out, sets);
    if (*twoagent) return cmd_twoagent(r1, r2, eq_tol);
  } catch (const biasdyn::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
