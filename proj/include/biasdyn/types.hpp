#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace biasdyn {

// Dense row-major matrix of doubles; rows are agents, columns alternatives.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Rows must sum to one within this tolerance to be accepted as simplex points.
inline constexpr double kSimplexTolerance = 1e-9;

// n agents x k alternatives; every row is a point of the (k-1)-simplex.
class OpinionState {
 public:
  // Throws DomainError if a row is negative, non-finite or does not sum to 1
  // within kSimplexTolerance, ShapeError if n or k is zero.
  explicit OpinionState(Matrix values);
  static OpinionState from_rows(const std::vector<std::vector<double>>& rows) {
    return OpinionState(Matrix::from_rows(rows));
  }

  std::size_t agents() const noexcept { return values_.rows(); }
  std::size_t alternatives() const noexcept { return values_.cols(); }
  std::span<const double> row(std::size_t i) const { return values_.row(i); }
  double operator()(std::size_t i, std::size_t l) const { return values_(i, l); }
  const Matrix& values() const noexcept { return values_; }

  friend bool operator==(const OpinionState&, const OpinionState&) = default;

 private:
  Matrix values_;
};

// Row i holds the diagonal of agent i's bias matrix. Entries are >= 0.
class BiasSet {
 public:
  explicit BiasSet(Matrix vectors);
  static BiasSet from_rows(const std::vector<std::vector<double>>& rows) {
    return BiasSet(Matrix::from_rows(rows));
  }
  // Every agent gets the same bias vector.
  static BiasSet uniform(std::size_t n, std::span<const double> bias);

  std::size_t agents() const noexcept { return vectors_.rows(); }
  std::size_t alternatives() const noexcept { return vectors_.cols(); }
  std::span<const double> row(std::size_t i) const { return vectors_.row(i); }
  double operator()(std::size_t i, std::size_t l) const { return vectors_(i, l); }
  const Matrix& vectors() const noexcept { return vectors_; }

  friend bool operator==(const BiasSet&, const BiasSet&) = default;

 private:
  Matrix vectors_;
};

using Edge = std::pair<std::size_t, std::size_t>;

// Simple undirected graph stored as sorted adjacency lists. Construction
// rejects self-loops, duplicate edges and out-of-range endpoints.
// Connectivity is not enforced here; see netgen.hpp.
class Network {
 public:
  Network() = default;
  Network(std::size_t n, const std::vector<Edge>& edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }
  std::span<const std::size_t> neighbors(std::size_t i) const { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const { return adjacency_[i].size(); }
  bool has_edge(std::size_t u, std::size_t v) const;

  // Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

struct Trajectory {
  std::vector<OpinionState> states;  // recorded snapshots, first is t = 0
  std::vector<std::size_t> times;    // time index of each snapshot
  bool converged = false;
  std::size_t steps = 0;             // number of updates applied
  double final_residual = 0.0;       // max per-agent 1-norm change of the last update

  const OpinionState& final_state() const { return states.back(); }
};

}  // namespace biasdyn
