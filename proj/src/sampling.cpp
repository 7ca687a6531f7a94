#include "biasdyn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "biasdyn/errors.hpp"

namespace biasdyn {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, StreamLabel label)
    : seed_(seed),
      label_(label),
      engine_(splitmix64(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(label))) {}

double SeededRng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform01_open_closed() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t SeededRng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("uniform_below needs a positive bound");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
  for (;;) {
    const std::uint64_t v = engine_();
    if (v <= limit) return v % bound;
  }
}

std::vector<double> sample_simplex_uniform(std::size_t k, SeededRng& rng) {
  if (k == 0) throw ShapeError("simplex dimension k must be at least 1");
  std::vector<double> x(k);
  double sum = 0.0;
  for (double& v : x) {
    v = -std::log(rng.uniform01_open_closed());
    sum += v;
  }
  // All draws can be -log(1) = 0 only with probability 2^-53k; fall back to
  // the barycenter rather than dividing by zero.
  if (sum == 0.0) {
    std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(k));
    return x;
  }
  for (double& v : x) v /= sum;
  return x;
}

OpinionState sample_uniform_state(std::size_t n, std::size_t k, SeededRng& rng) {
  Matrix m(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = sample_simplex_uniform(k, rng);
    std::copy(row.begin(), row.end(), m.row(i).begin());
  }
  return OpinionState(std::move(m));
}

namespace {

void check_pair(std::span<const double> majority, std::span<const double> minority) {
  if (majority.size() != minority.size()) {
    throw ShapeError(fmt::format("majority bias has {} entries, minority bias has {}",
                                 majority.size(), minority.size()));
  }
}

BiasSet two_group_biases(const std::vector<bool>& is_minority, std::span<const double> majority,
                         std::span<const double> minority) {
  Matrix m(is_minority.size(), majority.size());
  for (std::size_t i = 0; i < is_minority.size(); ++i) {
    const auto src = is_minority[i] ? minority : majority;
    std::copy(src.begin(), src.end(), m.row(i).begin());
  }
  return BiasSet(std::move(m));
}

}  // namespace

BiasSet assign_biases_by_community(const CommunityPartition& partition,
                                   std::span<const double> majority_bias,
                                   std::span<const double> minority_bias,
                                   std::size_t minority_community) {
  check_pair(majority_bias, minority_bias);
  if (minority_community >= partition.count()) {
    throw RangeError(fmt::format("community {} does not exist ({} communities)",
                                 minority_community, partition.count()));
  }
  std::vector<bool> is_minority(partition.assignment.size());
  for (std::size_t i = 0; i < is_minority.size(); ++i) {
    is_minority[i] = partition.assignment[i] == minority_community;
  }
  return two_group_biases(is_minority, majority_bias, minority_bias);
}

std::vector<std::size_t> sample_subset(std::size_t n, std::size_t count, SeededRng& rng) {
  if (count > n) {
    throw ConfigValueError(fmt::format("cannot choose {} of {} agents", count, n),
                           "minority_count");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

BiasSet assign_biases_random(std::size_t n, std::span<const double> majority_bias,
                             std::span<const double> minority_bias, std::size_t minority_count,
                             SeededRng& rng) {
  check_pair(majority_bias, minority_bias);
  std::vector<bool> is_minority(n, false);
  for (std::size_t i : sample_subset(n, minority_count, rng)) is_minority[i] = true;
  return two_group_biases(is_minority, majority_bias, minority_bias);
}

}  // namespace biasdyn
