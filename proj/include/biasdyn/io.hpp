#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biasdyn/experiments.hpp"
#include "biasdyn/netgen.hpp"
#include "biasdyn/types.hpp"

namespace biasdyn::io {

// File formats (all text, '\n' line endings, numbers printed with 17
// significant digits so doubles survive a round trip bit for bit):
//
//   trajectory CSV   header "t,agent,x1,...,xk", one row per (snapshot, agent),
//                    ordered by t then agent
//   opinion CSV      header "agent,x1,...,xk", one row per agent in order
//   bias CSV         header "agent,r1,...,rk", one row per agent in order
//   community CSV    header "agent,community"
//   ternary CSV      header "agent,x,y" (k = 3 only)
//   edge list        one "u v" pair per line, 0-indexed, u < v, sorted;
//                    blank lines and lines starting with '#' are ignored on read

std::string format_double(double v);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);
// Restores states and times; convergence metadata is not part of the file.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

void write_opinion_csv(const OpinionState& state, const std::filesystem::path& path);
OpinionState read_opinion_csv(const std::filesystem::path& path);

void write_bias_csv(const BiasSet& biases, const std::filesystem::path& path);
BiasSet read_bias_csv(const std::filesystem::path& path);

void write_edge_list(const Network& net, const std::filesystem::path& path);
// Node count is max index + 1 unless `n` is given.
Network read_edge_list(const std::filesystem::path& path, std::optional<std::size_t> n = {});

void write_community_csv(const CommunityPartition& partition, const std::filesystem::path& path);

// Barycentric to planar coordinates with corners e1 -> (0, 0), e2 -> (1, 0),
// e3 -> (1/2, sqrt(3)/2). Throws UnsupportedDimensionError unless k = 3.
std::vector<std::array<double, 2>> ternary_project(const OpinionState& state);
void write_ternary_csv(const OpinionState& state, const std::filesystem::path& path);

// YAML summary: scenario, seed, converged, steps, final_residual, shape,
// metrics, cluster_histogram and community_sizes when a partition was used.
void write_summary(const ExperimentResult& result, const std::filesystem::path& path);

// Writes trajectory.csv, summary.yaml, graph.edges, biases.csv,
// final_opinions.csv, plus communities.csv and ternary.csv where applicable.
void write_result_bundle(const ExperimentResult& result, const std::filesystem::path& dir);

}  // namespace biasdyn::io
