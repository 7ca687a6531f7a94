#include "biasdyn/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "biasdyn/errors.hpp"

namespace biasdyn {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix{};
  const std::size_t cols = rows.front().size();
  Matrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      throw ShapeError(fmt::format("row {} has {} entries, expected {}", r, rows[r].size(), cols));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

OpinionState::OpinionState(Matrix values) : values_(std::move(values)) {
  if (values_.rows() == 0 || values_.cols() == 0) {
    throw ShapeError("opinion state needs at least one agent and one alternative");
  }
  for (std::size_t i = 0; i < values_.rows(); ++i) {
    double sum = 0.0;
    for (double v : values_.row(i)) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(fmt::format("agent {} has a negative or non-finite opinion entry", i));
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance) {
      throw DomainError(fmt::format("agent {} opinion sums to {:.17g}, not 1", i, sum));
    }
  }
}

BiasSet::BiasSet(Matrix vectors) : vectors_(std::move(vectors)) {
  if (vectors_.rows() == 0 || vectors_.cols() == 0) {
    throw ShapeError("bias set needs at least one agent and one alternative");
  }
  for (std::size_t i = 0; i < vectors_.rows(); ++i) {
    for (double v : vectors_.row(i)) {
      if (!std::isfinite(v) || v < 0.0) {
        throw DomainError(fmt::format("agent {} has a negative or non-finite bias entry", i));
      }
    }
  }
}

BiasSet BiasSet::uniform(std::size_t n, std::span<const double> bias) {
  Matrix m(n, bias.size());
  for (std::size_t i = 0; i < n; ++i) std::copy(bias.begin(), bias.end(), m.row(i).begin());
  return BiasSet(std::move(m));
}

Network::Network(std::size_t n, const std::vector<Edge>& edges) : adjacency_(n) {
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw DomainError(fmt::format("edge ({}, {}) references a node outside 0..{}", u, v, n));
    }
    if (u == v) throw DomainError(fmt::format("self-loop at node {}", u));
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& adj = adjacency_[i];
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) {
      throw DomainError(fmt::format("duplicate edge at node {}", i));
    }
  }
  edge_count_ = edges.size();
}

bool Network::has_edge(std::size_t u, std::size_t v) const {
  const auto& adj = adjacency_.at(u);
  return std::binary_search(adj.begin(), adj.end(), v);
}

std::vector<Edge> Network::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < adjacency_.size(); ++u) {
    for (std::size_t v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

}  // namespace biasdyn
