#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "isotree/core.hpp"

namespace isotree {

/// Thrown when the affinity graph has more than one connected component.
class disconnected_graph : public std::runtime_error {
 public:
  disconnected_graph(const std::string& what, std::vector<std::vector<Vertex>> components)
      : std::runtime_error(what), components_(std::move(components)) {}

  [[nodiscard]] const std::vector<std::vector<Vertex>>& components() const { return components_; }

 private:
  std::vector<std::vector<Vertex>> components_;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), Vertex{0}); }

  Vertex find(Vertex x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<Vertex> parent_;
  std::vector<unsigned char> rank_;
};

inline std::string describe_components(const std::vector<std::vector<Vertex>>& comps) {
  std::string out = "graph is disconnected (" + std::to_string(comps.size()) + " components):";
  constexpr std::size_t kShown = 8;
  for (std::size_t c = 0; c < comps.size() && c < kShown; ++c) {
    out += " {";
    for (std::size_t i = 0; i < comps[c].size() && i < kShown; ++i) {
      if (i) out += ",";
      out += std::to_string(comps[c][i]);
    }
    if (comps[c].size() > kShown) out += ",...";
    out += "}";
  }
  if (comps.size() > kShown) out += " ...";
  return out;
}

}  // namespace detail

/// Kruskal over edge distances. Ties are broken by the (lower, higher) vertex
/// pair so the result is reproducible. Returns indices into graph.edges.
inline std::vector<std::size_t> minimum_spanning_tree(const AffinityGraph& graph) {
  const std::size_t n = graph.size();
  if (n == 0) throw std::invalid_argument("empty graph");
  auto key = [&](std::size_t i) {
    const auto& e = graph.edges[i];
    return std::tuple(e.distance, std::min(e.u, e.v), std::max(e.u, e.v));
  };
  std::vector<std::size_t> order(graph.edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  detail::DisjointSets sets(n);
  std::vector<std::size_t> chosen;
  chosen.reserve(n - 1);
  for (std::size_t i : order) {
    if (chosen.size() + 1 == n) break;
    const auto& e = graph.edges[i];
    if (sets.unite(e.u, e.v)) chosen.push_back(i);
  }
  if (chosen.size() + 1 != n) {
    std::vector<std::vector<Vertex>> comps;
    std::vector<std::size_t> index(n, kNoVertex);
    for (Vertex x = 0; x < n; ++x) {
      const Vertex r = sets.find(x);
      if (index[r] == kNoVertex) {
        index[r] = comps.size();
        comps.emplace_back();
      }
      comps[index[r]].push_back(x);
    }
    throw disconnected_graph(detail::describe_components(comps), std::move(comps));
  }
  return chosen;
}

/// Default root: the vertex of largest weight, lowest index on ties.
inline Vertex default_root(const AffinityGraph& graph) {
  return static_cast<Vertex>(std::max_element(graph.weights.begin(), graph.weights.end(),
                                              [](Quantity a, Quantity b) { return a < b; }) -
                             graph.weights.begin());
}

struct TreeOptions {
  std::optional<Vertex> root;
  /// Recompute vertex weights from tree-incident flows instead of inheriting
  /// them from the affinity graph.
  bool recompute_weights = false;
};

/// Restricts the graph to the spanning-tree edges and roots it. Weights,
/// potentials and flows are copied unchanged unless recompute_weights is set.
inline WeightedTree build_weighted_tree(std::span<const std::size_t> tree_edges, const AffinityGraph& graph,
                                        const TreeOptions& options = {}) {
  const std::size_t n = graph.size();
  const Vertex root = options.root.value_or(default_root(graph));
  if (root >= n) throw std::out_of_range("root " + std::to_string(root) + " is not a vertex");
  std::vector<TreeEdge> edges;
  edges.reserve(tree_edges.size());
  for (std::size_t i : tree_edges) {
    if (i >= graph.edges.size()) throw std::out_of_range("edge index out of range");
    const auto& e = graph.edges[i];
    edges.push_back({e.u, e.v, e.flow});
  }
  std::vector<Quantity> weights = graph.weights;
  if (options.recompute_weights) {
    std::fill(weights.begin(), weights.end(), Quantity{});
    for (const auto& e : edges) {
      weights[e.u] += e.flow;
      weights[e.v] += e.flow;
    }
  }
  return WeightedTree(std::move(edges), std::move(weights), graph.potentials, root, graph.quantizer);
}

}  // namespace isotree
