#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "biasdyn/types.hpp"

namespace biasdyn {

struct WattsStrogatzParams {
  std::size_t n = 500;
  std::size_t ring_degree = 10;  // even; each node starts with ring_degree/2 neighbors per side
  double rewire_p = 0.1;
};

inline constexpr std::size_t kMaxGenerationAttempts = 100;

// Ring lattice with each ring edge (u, u + j) rewired with probability
// rewire_p to a uniformly chosen node that is neither u nor already adjacent
// to u. Disconnected draws are discarded and regenerated from seed + attempt,
// up to kMaxGenerationAttempts times.
Network watts_strogatz(const WattsStrogatzParams& params, std::uint64_t seed);

// Breadth-first reachability from node 0.
bool is_connected(const Network& net);
// Throws DomainError when the graph is not connected.
void require_connected(const Network& net);

struct CommunityPartition {
  std::vector<std::size_t> assignment;  // community id per node, ids contiguous from 0
  std::vector<std::size_t> sizes;       // node count per community
  double modularity = 0.0;

  std::size_t count() const noexcept { return sizes.size(); }
  std::vector<std::size_t> members(std::size_t community) const;
  // Smallest community, lowest id on ties.
  std::size_t smallest() const;
};

// Greedy agglomerative modularity maximization (Clauset-Newman-Moore).
// Starts from singletons, merges the pair with the largest modularity gain
// (lowest community-id pair on ties) and stops once no merge has a positive
// gain. Community ids are renumbered in order of each community's lowest node.
CommunityPartition detect_communities(const Network& net);

// Newman modularity of an arbitrary assignment.
double modularity(const Network& net, std::span<const std::size_t> assignment);

}  // namespace biasdyn
