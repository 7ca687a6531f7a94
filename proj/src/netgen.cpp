#include "biasdyn/netgen.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "biasdyn/errors.hpp"
#include "biasdyn/sampling.hpp"

namespace biasdyn {

namespace {

Network watts_strogatz_once(const WattsStrogatzParams& params, SeededRng& rng) {
  const std::size_t n = params.n;
  const std::size_t half = params.ring_degree / 2;
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t j = 1; j <= half; ++j) {
      const std::size_t v = (u + j) % n;
      adj[u].insert(v);
      adj[v].insert(u);
    }
  }

  // Same visiting order as the classic construction: all offset-1 edges,
  // then all offset-2 edges, and so on.
  for (std::size_t j = 1; j <= half; ++j) {
    for (std::size_t u = 0; u < n; ++u) {
      const std::size_t v = (u + j) % n;
      if (rng.uniform01() >= params.rewire_p) continue;
      if (adj[u].size() >= n - 1 || !adj[u].contains(v)) continue;
      std::size_t w = 0;
      do {
        w = static_cast<std::size_t>(rng.uniform_below(n));
      } while (w == u || adj[u].contains(w));
      adj[u].erase(v);
      adj[v].erase(u);
      adj[u].insert(w);
      adj[w].insert(u);
    }
  }

  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v : adj[u]) {
      if (u < v) edges.emplace_back(u, v);
    }
  }
  return Network(n, edges);
}

}  // namespace

Network watts_strogatz(const WattsStrogatzParams& params, std::uint64_t seed) {
  if (params.ring_degree < 2 || params.ring_degree % 2 != 0) {
    throw ConfigValueError("ring degree must be an even integer >= 2", "ring_degree");
  }
  if (params.n <= params.ring_degree) {
    throw ConfigValueError(
        fmt::format("need n > ring_degree, got n = {}, ring_degree = {}", params.n,
                    params.ring_degree),
        "n");
  }
  if (!(params.rewire_p >= 0.0 && params.rewire_p <= 1.0)) {
    throw ConfigValueError("rewiring probability must lie in [0, 1]", "rewire_p");
  }
  for (std::size_t attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    SeededRng rng(seed + attempt, StreamLabel::Graph);
    Network net = watts_strogatz_once(params, rng);
    if (is_connected(net)) return net;
    spdlog::debug("Watts-Strogatz attempt {} disconnected, retrying", attempt);
  }
  throw GenerationError(fmt::format("no connected Watts-Strogatz graph after {} attempts",
                                    kMaxGenerationAttempts));
}

bool is_connected(const Network& net) {
  const std::size_t n = net.size();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : net.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

void require_connected(const Network& net) {
  if (!is_connected(net)) throw DomainError("graph is not connected");
}

std::vector<std::size_t> CommunityPartition::members(std::size_t community) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == community) out.push_back(i);
  }
  return out;
}

std::size_t CommunityPartition::smallest() const {
  if (sizes.empty()) throw RangeError("partition has no communities");
  return static_cast<std::size_t>(std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
}

double modularity(const Network& net, std::span<const std::size_t> assignment) {
  if (assignment.size() != net.size()) throw ShapeError("assignment size differs from node count");
  const double m = static_cast<double>(net.edge_count());
  if (m == 0.0) return 0.0;
  const std::size_t groups =
      assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<double> internal(groups, 0.0);
  std::vector<double> degree(groups, 0.0);
  for (std::size_t u = 0; u < net.size(); ++u) {
    degree[assignment[u]] += static_cast<double>(net.degree(u));
    for (std::size_t v : net.neighbors(u)) {
      if (u < v && assignment[u] == assignment[v]) internal[assignment[u]] += 1.0;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < groups; ++c) {
    const double share = degree[c] / (2.0 * m);
    q += internal[c] / m - share * share;
  }
  return q;
}

CommunityPartition detect_communities(const Network& net) {
  require_connected(net);
  const std::size_t n = net.size();
  const double two_m = 2.0 * static_cast<double>(net.edge_count());

  // links[c][d]: fraction of edge endpoints joining c to d (e_cd, c != d);
  // degree_share[c]: fraction of all endpoints inside c (a_c).
  std::vector<std::map<std::size_t, double>> links(n);
  std::vector<double> degree_share(n, 0.0);
  std::vector<std::vector<std::size_t>> members(n);
  std::vector<bool> alive(n, true);
  double q = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    members[u] = {u};
    if (two_m > 0.0) {
      degree_share[u] = static_cast<double>(net.degree(u)) / two_m;
      for (std::size_t v : net.neighbors(u)) links[u][v] = 1.0 / two_m;
    }
    q -= degree_share[u] * degree_share[u];
  }

  for (;;) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::size_t best_c = 0, best_d = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (!alive[c]) continue;
      for (const auto& [d, e] : links[c]) {
        if (d <= c) continue;
        const double gain = 2.0 * (e - degree_share[c] * degree_share[d]);
        if (gain > best_gain) {
          best_gain = gain;
          best_c = c;
          best_d = d;
        }
      }
    }
    if (!(best_gain > 0.0)) break;

    // Fold best_d into best_c.
    for (const auto& [x, e] : links[best_d]) {
      if (x == best_c) continue;
      links[best_c][x] += e;
      links[x][best_c] += e;
      links[x].erase(best_d);
    }
    links[best_c].erase(best_d);
    links[best_d].clear();
    degree_share[best_c] += degree_share[best_d];
    members[best_c].insert(members[best_c].end(), members[best_d].begin(), members[best_d].end());
    members[best_d].clear();
    alive[best_d] = false;
    q += best_gain;
  }

  // Renumber by lowest member node.
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (lowest node, community)
  for (std::size_t c = 0; c < n; ++c) {
    if (alive[c]) {
      order.emplace_back(*std::min_element(members[c].begin(), members[c].end()), c);
    }
  }
  std::sort(order.begin(), order.end());

  CommunityPartition out;
  out.assignment.assign(n, 0);
  for (std::size_t id = 0; id < order.size(); ++id) {
    const auto& group = members[order[id].second];
    for (std::size_t u : group) out.assignment[u] = id;
    out.sizes.push_back(group.size());
  }
  out.modularity = q;
  return out;
}

}  // namespace biasdyn
