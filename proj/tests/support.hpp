#pragma once

// Test-only helpers: random instance generators and a dense reference
// implementation of the update rule that shares no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "biasdyn/types.hpp"

namespace biasdyn::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Random tree plus extra random edges: always connected and simple.
inline Network random_connected_graph(std::size_t n, Rng& rng, double extra_density = 0.2) {
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  auto add = [&](std::size_t u, std::size_t v) {
    if (u == v || adj[u][v]) return;
    adj[u][v] = adj[v][u] = true;
    edges.emplace_back(std::min(u, v), std::max(u, v));
  };
  for (std::size_t v = 1; v < n; ++v) add(v, uniform_int(rng, 0, v - 1));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (uniform(rng) < extra_density) add(u, v);
    }
  }
  return Network(n, edges);
}

// Rows drawn by normalizing uniform entries; optionally zero out entries.
inline OpinionState random_state(std::size_t n, std::size_t k, Rng& rng, double zero_prob = 0.0) {
  Matrix m(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t l = 0; l < k; ++l) {
      m(i, l) = uniform(rng) < zero_prob ? 0.0 : uniform(rng, 0.01, 1.0);
      sum += m(i, l);
    }
    if (sum == 0.0) {
      m(i, uniform_int(rng, 0, k - 1)) = 1.0;
      sum = 1.0;
    }
    for (std::size_t l = 0; l < k; ++l) m(i, l) /= sum;
  }
  return OpinionState(std::move(m));
}

inline BiasSet random_biases(std::size_t n, std::size_t k, Rng& rng, double zero_prob = 0.0,
                             double hi = 1.0) {
  Matrix m(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < k; ++l) m(i, l) = uniform(rng) < zero_prob ? 0.0 : uniform(rng, 0.0, hi);
  }
  return BiasSet(std::move(m));
}

inline OpinionState corner_state(std::size_t n, std::size_t k, std::size_t corner) {
  Matrix m(n, k);
  for (std::size_t i = 0; i < n; ++i) m(i, corner) = 1.0;
  return OpinionState(std::move(m));
}

// Dense adjacency matrix built from the edge list.
inline std::vector<std::vector<int>> dense_adjacency(const Network& net) {
  std::vector<std::vector<int>> a(net.size(), std::vector<int>(net.size(), 0));
  for (const auto& [u, v] : net.edges()) a[u][v] = a[v][u] = 1;
  return a;
}

// Numerator x_i + sum_j A_ij r_i .* x_j of the update, by brute force.
inline Matrix reference_numerator(const OpinionState& x, const BiasSet& r, const Network& net) {
  const auto a = dense_adjacency(net);
  const std::size_t n = x.agents(), k = x.alternatives();
  Matrix out(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      double acc = x(i, l);
      for (std::size_t j = 0; j < n; ++j) acc += a[i][j] * r(i, l) * x(j, l);
      out(i, l) = acc;
    }
  }
  return out;
}

inline Matrix reference_step(const OpinionState& x, const BiasSet& r, const Network& net) {
  Matrix out = reference_numerator(x, r, net);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    double norm = 0.0;
    for (double v : out.row(i)) norm += std::abs(v);
    for (double& v : out.row(i)) v /= norm;
  }
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

// Path graph 0 - 1 - ... - (n-1).
inline Network path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Network(n, edges);
}

inline Network complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Network(n, edges);
}

}  // namespace biasdyn::testing
