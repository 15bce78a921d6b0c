#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "isotree/core.hpp"

namespace isotree::testing {

// Trees with integer weights: quantization bits 0, so raw values are the integers themselves.
inline const Quantizer kUnit{0};

struct Edge {
  Vertex u;
  Vertex v;
  std::int64_t flow;
};

inline std::vector<Quantity> quantities(const std::vector<std::int64_t>& values) {
  std::vector<Quantity> out;
  for (auto v : values) out.emplace_back(v);
  return out;
}

inline WeightedTree make_tree(const std::vector<Edge>& edges, const std::vector<std::int64_t>& weights,
                              std::vector<std::int64_t> potentials = {}, Vertex root = 0) {
  if (potentials.empty()) potentials.assign(weights.size(), 0);
  std::vector<TreeEdge> tree_edges;
  for (const auto& e : edges) tree_edges.push_back({e.u, e.v, Quantity{e.flow}});
  return WeightedTree(std::move(tree_edges), quantities(weights), quantities(potentials), root, kUnit);
}

/// Path 0-1-...-(n-1) with unit weights and flows.
inline WeightedTree unit_path(std::size_t n, Vertex root = 0) {
  std::vector<Edge> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1});
  return make_tree(edges, std::vector<std::int64_t>(n, 1), {}, root);
}

/// Star used for the residue-hardness construction: centre 0 (weight 1),
/// vertices 1..3 (weights 18, 18, 19), vertex 4 (weight 1) and eight leaves
/// 5..12 of weight 14; every edge has flow 1, no potentials.
inline WeightedTree hardness_star() {
  std::vector<std::int64_t> weights{1, 18, 18, 19, 1};
  for (int i = 0; i < 8; ++i) weights.push_back(14);
  std::vector<Edge> edges;
  for (Vertex v = 1; v < weights.size(); ++v) edges.push_back({0, v, 1});
  return make_tree(edges, weights);
}

/// Path a-b-c (0-1-2), unit weights and flows, potentials (0, 0, 10).
inline WeightedTree p3_fixture() { return make_tree({{0, 1, 1}, {1, 2, 1}}, {1, 1, 1}, {0, 0, 10}); }

struct RandomTreeSpec {
  std::size_t min_n = 3;
  std::size_t max_n = 10;
  std::int64_t max_weight = 16;
  std::int64_t max_flow = 16;
  std::int64_t max_potential = 8;
};

/// Uniform random recursive tree with shuffled labels and a random root.
inline WeightedTree random_tree(std::mt19937_64& rng, std::size_t n, const RandomTreeSpec& spec = {}) {
  std::vector<Vertex> label(n);
  std::iota(label.begin(), label.end(), Vertex{0});
  std::shuffle(label.begin(), label.end(), rng);
  std::uniform_int_distribution<std::int64_t> weight(1, spec.max_weight);
  std::uniform_int_distribution<std::int64_t> flow(1, spec.max_flow);
  std::uniform_int_distribution<std::int64_t> potential(0, spec.max_potential);
  std::vector<Edge> edges;
  for (Vertex i = 1; i < n; ++i) {
    const Vertex parent = std::uniform_int_distribution<Vertex>(0, i - 1)(rng);
    edges.push_back({label[parent], label[i], flow(rng)});
  }
  std::vector<std::int64_t> weights(n);
  std::vector<std::int64_t> potentials(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = weight(rng);
    potentials[i] = potential(rng);
  }
  const Vertex root = std::uniform_int_distribution<Vertex>(0, n - 1)(rng);
  return make_tree(edges, weights, potentials, root);
}

inline WeightedTree random_tree(std::mt19937_64& rng, const RandomTreeSpec& spec = {}) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(spec.min_n, spec.max_n)(rng);
  return random_tree(rng, n, spec);
}

inline std::size_t random_k(std::mt19937_64& rng, std::size_t n, std::size_t max_k = 4) {
  return std::uniform_int_distribution<std::size_t>(2, std::min(max_k, n))(rng);
}

inline Rational random_alpha(std::mt19937_64& rng) {
  static const Rational choices[] = {Rational{0}, Rational{1, 2}, Rational{1}};
  return choices[std::uniform_int_distribution<int>(0, 2)(rng)];
}

}  // namespace isotree::testing
