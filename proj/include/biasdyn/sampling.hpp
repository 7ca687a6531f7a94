#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "biasdyn/netgen.hpp"
#include "biasdyn/types.hpp"

namespace biasdyn {

enum class StreamLabel : std::uint64_t { Graph = 1, Opinions = 2, BiasAssignment = 3 };

// Deterministic generator for one labeled stream of an experiment seed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Its seed is splitmix64(seed + golden * label), so streams with
// different labels are decorrelated and reseeding one (say the graph) leaves
// the others untouched. All conversions to doubles and bounded integers are
// done here rather than through <random> distributions, whose algorithms are
// implementation-defined, so draws match across standard libraries.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, StreamLabel label);

  std::uint64_t seed() const noexcept { return seed_; }
  StreamLabel label() const noexcept { return label_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on (0, 1].
  double uniform01_open_closed();
  // Uniform integer in [0, bound), rejection-sampled; bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  StreamLabel label_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Flat Dirichlet draw: k standard exponentials normalized by their sum.
std::vector<double> sample_simplex_uniform(std::size_t k, SeededRng& rng);

// n independent uniform simplex rows.
OpinionState sample_uniform_state(std::size_t n, std::size_t k, SeededRng& rng);

// Members of `minority_community` get minority_bias, everyone else majority_bias.
BiasSet assign_biases_by_community(const CommunityPartition& partition,
                                   std::span<const double> majority_bias,
                                   std::span<const double> minority_bias,
                                   std::size_t minority_community);

// A uniformly random minority_count-subset of the n agents gets minority_bias.
BiasSet assign_biases_random(std::size_t n, std::span<const double> majority_bias,
                             std::span<const double> minority_bias, std::size_t minority_count,
                             SeededRng& rng);

// Indices chosen by assign_biases_random for the same arguments, sorted.
std::vector<std::size_t> sample_subset(std::size_t n, std::size_t count, SeededRng& rng);

}  // namespace biasdyn
