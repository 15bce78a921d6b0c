#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "isotree/core.hpp"

namespace isotree {

// Exhaustive ground truth for small trees. Deliberately naive: every
// assignment of vertices to {residue, part 1..k} is enumerated once, with
// parts numbered by their smallest vertex, and costs are compared by exact
// cross-multiplication.

struct OracleLimits {
  std::size_t max_vertices = 12;
};

struct OracleResult {
  Rational value;
  std::vector<Subpartition> minimizers;
};

namespace detail {

using OracleInt = boost::multiprecision::checked_int256_t;

class Enumerator {
 public:
  Enumerator(const WeightedTree& tree, std::size_t k, const Rational& alpha)
      : tree_(tree), k_(k), assign_(tree.size(), 0) {
    const BigInt a = boost::multiprecision::numerator(alpha);
    const BigInt b = boost::multiprecision::denominator(alpha);
    alpha_num_ = OracleInt{a};
    alpha_den_ = OracleInt{b};
  }

  OracleResult run() {
    recurse(0, 0);
    OracleResult out;
    out.value = Rational{BigInt{best_num_}, BigInt{best_den_}};
    out.minimizers = std::move(minimizers_);
    return out;
  }

 private:
  void recurse(Vertex x, std::size_t used) {
    const std::size_t n = tree_.size();
    if (n - x < k_ - used) return;  // not enough vertices left to open the remaining parts
    if (x == n) {
      evaluate();
      return;
    }
    for (std::size_t label = 0; label <= std::min(used + 1, k_); ++label) {
      assign_[x] = label;
      recurse(x + 1, label == used + 1 ? used + 1 : used);
    }
  }

  void evaluate() {
    std::vector<OracleInt> boundary(k_ + 1, 0);
    std::vector<OracleInt> potential(k_ + 1, 0);
    std::vector<OracleInt> weight(k_ + 1, 0);
    for (Vertex x = 0; x < tree_.size(); ++x) {
      potential[assign_[x]] += tree_.potential(x).raw();
      weight[assign_[x]] += tree_.weight(x).raw();
    }
    for (const auto& e : tree_.edges()) {
      const std::size_t a = assign_[e.u];
      const std::size_t b = assign_[e.v];
      if (a == b) continue;
      boundary[a] += e.flow.raw();
      boundary[b] += e.flow.raw();
    }
    // cost = max_i (den*phi + num*p) / (den*omega)
    OracleInt num = -1;
    OracleInt den = 1;
    for (std::size_t i = 1; i <= k_; ++i) {
      const OracleInt ni = alpha_den_ * boundary[i] + alpha_num_ * potential[i];
      const OracleInt di = alpha_den_ * weight[i];
      if (num < 0 || ni * den > num * di) {
        num = ni;
        den = di;
      }
    }
    const int cmp = best_num_ < 0 ? -1 : (num * best_den_ < best_num_ * den ? -1 : (num * best_den_ == best_num_ * den ? 0 : 1));
    if (cmp > 0) return;
    if (cmp < 0) {
      best_num_ = num;
      best_den_ = den;
      minimizers_.clear();
    }
    Subpartition sub{tree_.size(), std::vector<std::vector<Vertex>>(k_)};
    for (Vertex x = 0; x < tree_.size(); ++x) {
      if (assign_[x] > 0) sub.parts[assign_[x] - 1].push_back(x);
    }
    minimizers_.push_back(std::move(sub));
  }

  const WeightedTree& tree_;
  std::size_t k_;
  std::vector<std::size_t> assign_;
  OracleInt alpha_num_;
  OracleInt alpha_den_;
  OracleInt best_num_ = -1;
  OracleInt best_den_ = 1;
  std::vector<Subpartition> minimizers_;
};

inline void check_oracle_input(const WeightedTree& tree, std::size_t k, std::size_t max_vertices) {
  if (tree.size() > max_vertices) {
    throw std::length_error("brute force is limited to " + std::to_string(max_vertices) + " vertices, got " +
                            std::to_string(tree.size()));
  }
  if (k < 2 || k > tree.size()) throw std::out_of_range("part count k must lie in [2, n]");
}

}  // namespace detail

/// MISO_{k,alpha} and every minimizing k-subpartition, by enumeration.
inline OracleResult brute_force_miso(const WeightedTree& tree, std::size_t k, const Rational& alpha = Rational{1},
                                     OracleLimits limits = {}) {
  detail::check_oracle_input(tree, k, limits.max_vertices);
  if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
  return detail::Enumerator(tree, k, alpha).run();
}

/// Smallest residue number over all minimizers.
inline std::size_t brute_force_min_residue(const WeightedTree& tree, std::size_t k, const Rational& alpha = Rational{0},
                                           OracleLimits limits = {}) {
  const auto result = brute_force_miso(tree, k, alpha, limits);
  std::size_t best = tree.size();
  for (const auto& m : result.minimizers) best = std::min(best, m.residue_number());
  return best;
}

/// Vertices that belong to no minimizer of MISO_{k,beta} for any grid beta >= alpha.
inline std::vector<Vertex> exact_outlier_set(const WeightedTree& tree, std::size_t k, const Rational& alpha,
                                             const std::vector<Rational>& beta_grid, OracleLimits limits = {8}) {
  detail::check_oracle_input(tree, k, limits.max_vertices);
  std::vector<char> covered(tree.size(), 0);
  for (const auto& beta : beta_grid) {
    if (beta < alpha) continue;
    for (const auto& m : brute_force_miso(tree, k, beta, limits).minimizers) {
      for (const auto& part : m.parts) {
        for (Vertex x : part) covered[x] = 1;
      }
    }
  }
  std::vector<Vertex> out;
  for (Vertex x = 0; x < tree.size(); ++x) {
    if (!covered[x]) out.push_back(x);
  }
  return out;
}

}  // namespace isotree
