#pragma once

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace isotree {

namespace detail {

/// Minimum-cost perfect assignment on a square matrix (Hungarian method,
/// O(n^3)). Returns the column assigned to each row.
inline std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<long long>>& cost) {
  const std::size_t n = cost.size();
  constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0);
  std::vector<long long> v(n + 1, 0);
  std::vector<std::size_t> match(n + 1, 0);  // column -> row, 1-based
  std::vector<std::size_t> way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<long long> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const std::size_t r = match[col0];
      long long delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const long long cur = cost[r - 1][c - 1] - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t c = 1; c <= n; ++c) {
    if (match[c] != 0) assignment[match[c] - 1] = c - 1;
  }
  return assignment;
}

}  // namespace detail

/// Fraction of points whose cluster, under the best injective mapping of
/// clusters onto classes, disagrees with the true class. Residue points (-1)
/// and points of unmatched clusters always count as errors.
inline double misclassification_rate(const std::vector<int>& predicted, const std::vector<std::string>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("length mismatch: " + std::to_string(predicted.size()) + " predicted vs " +
                                std::to_string(truth.size()) + " true labels");
  }
  if (predicted.empty()) return 0.0;
  std::map<int, std::size_t> clusters;
  std::map<std::string, std::size_t> classes;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] >= 0) clusters.try_emplace(predicted[i], clusters.size());
    classes.try_emplace(truth[i], classes.size());
  }
  const std::size_t size = std::max(clusters.size(), classes.size());
  std::vector<std::vector<long long>> cost(size, std::vector<long long>(size, 0));
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0) continue;
    --cost[clusters.at(predicted[i])][classes.at(truth[i])];
  }
  const auto assignment = detail::min_cost_assignment(cost);
  long long correct = 0;
  for (std::size_t r = 0; r < size; ++r) correct -= cost[r][assignment[r]];
  return 1.0 - static_cast<double>(correct) / static_cast<double>(predicted.size());
}

}  // namespace isotree
