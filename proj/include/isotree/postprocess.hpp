#pragma once

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "isotree/core.hpp"
#include "isotree/solver.hpp"

namespace isotree {

/// An edge joining a part to a residue vertex.
struct BreakEdge {
  std::size_t part = 0;  // 0-based part index
  Vertex inside = 0;     // endpoint in the part
  Vertex outside = 0;    // residue endpoint (a start vertex)

  friend bool operator==(const BreakEdge&, const BreakEdge&) = default;
};

/// Connected component of residue vertices once break edges are removed.
struct ResidueSubtree {
  std::vector<Vertex> vertices;
  std::vector<Vertex> start_vertices;
  std::vector<BreakEdge> break_edges;
};

inline std::vector<ResidueSubtree> residue_subtrees(const WeightedTree& tree, const Subpartition& sub) {
  if (sub.vertex_count != tree.size()) throw invalid_subpartition("subpartition and tree sizes differ");
  check_subpartition(sub);
  const auto label = sub.labels();
  const std::size_t n = tree.size();
  std::vector<std::size_t> component(n, kNoVertex);
  std::vector<ResidueSubtree> out;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (label[s] >= 0 || component[s] != kNoVertex) continue;
    const std::size_t id = out.size();
    auto& c = out.emplace_back();
    component[s] = id;
    stack.assign(1, s);
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      c.vertices.push_back(x);
      bool start = false;
      for (const auto& nb : tree.neighbors(x)) {
        if (label[nb.vertex] > 0) {
          start = true;
          c.break_edges.push_back({static_cast<std::size_t>(label[nb.vertex] - 1), nb.vertex, x});
        } else if (component[nb.vertex] == kNoVertex) {
          component[nb.vertex] = id;
          stack.push_back(nb.vertex);
        }
      }
      if (start) c.start_vertices.push_back(x);
    }
    std::sort(c.vertices.begin(), c.vertices.end());
    std::sort(c.start_vertices.begin(), c.start_vertices.end());
    std::sort(c.break_edges.begin(), c.break_edges.end(), [](const BreakEdge& a, const BreakEdge& b) {
      return std::tuple(a.part, a.inside, a.outside) < std::tuple(b.part, b.inside, b.outside);
    });
  }
  return out;
}

namespace detail {

/// Contracts the part with the start vertex of the break edge into one root,
/// grows it through the residue subtree leaves-first (a child joins when
/// P - f <= N W), and keeps the result only if the enlarged part's normalized
/// flow stays within N.
inline std::vector<Vertex> absorb(const WeightedTree& tree, const ScaledTree& scaled, const Subpartition& sub,
                                  const BreakEdge& edge, const ResidueSubtree& subtree, const Threshold& bound,
                                  const Rational& alpha) {
  const std::size_t n = tree.size();
  const auto& part = sub.parts[edge.part];
  std::vector<char> in_part(n, 0);
  std::vector<char> in_subtree(n, 0);
  for (Vertex x : part) in_part[x] = 1;
  for (Vertex x : subtree.vertices) in_subtree[x] = 1;

  auto edge_flow = [&](Vertex x, Vertex y) {
    // scaled flow of tree edge xy; one of them is the other's parent
    return tree.parent(x) == y ? scaled.parent_flow[x] : scaled.parent_flow[y];
  };

  const Vertex s = edge.outside;
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<Vertex> bfs{s};
  std::vector<char> seen(n, 0);
  seen[s] = 1;
  for (std::size_t head = 0; head < bfs.size(); ++head) {
    const Vertex x = bfs[head];
    for (const auto& nb : tree.neighbors(x)) {
      if (in_subtree[nb.vertex] && !seen[nb.vertex]) {
        seen[nb.vertex] = 1;
        parent[nb.vertex] = x;
        bfs.push_back(nb.vertex);
      }
    }
  }

  std::vector<Wide> potential(n, 0);
  std::vector<Wide> weight(n, 0);
  for (Vertex x : bfs) {
    potential[x] = scaled.potential[x];
    weight[x] = scaled.weight[x];
    for (const auto& nb : tree.neighbors(x)) {
      if (!in_subtree[nb.vertex] && !(x == s && in_part[nb.vertex])) potential[x] += edge_flow(x, nb.vertex);
    }
  }
  for (Vertex y : part) {
    potential[s] += scaled.potential[y];
    weight[s] += scaled.weight[y];
    for (const auto& nb : tree.neighbors(y)) {
      if (!in_part[nb.vertex] && nb.vertex != s) potential[s] += edge_flow(y, nb.vertex);
    }
  }

  std::vector<char> joined(n, 0);
  for (auto it = bfs.rbegin(); it != bfs.rend(); ++it) {
    const Vertex x = *it;
    if (x == s) break;
    const Vertex u = parent[x];
    const Wide f = edge_flow(x, u);
    if (bound.compare(potential[x] - f, weight[x]) <= 0) {
      potential[u] += potential[x];
      weight[u] += weight[x];
      joined[x] = 1;
    } else {
      potential[u] += f;
    }
  }
  // A vertex is absorbed when its whole path to s joined.
  std::vector<Vertex> absorbed{s};
  std::vector<char> kept(n, 0);
  kept[s] = 1;
  for (Vertex x : bfs) {
    if (x != s && joined[x] && kept[parent[x]]) {
      kept[x] = 1;
      absorbed.push_back(x);
    }
  }
  std::sort(absorbed.begin(), absorbed.end());

  std::vector<Vertex> enlarged = part;
  enlarged.insert(enlarged.end(), absorbed.begin(), absorbed.end());
  if (normalized_flow(tree, enlarged, alpha) > bound.value()) return {};
  return absorbed;
}

}  // namespace detail

/// Residue vertices that can join part `part` through `edge` while its
/// normalized flow stays within `bound`; empty when the enlarged part fails.
inline std::vector<Vertex> absorb_subtree(const WeightedTree& tree, const Subpartition& sub, std::size_t part,
                                          const BreakEdge& edge, const ResidueSubtree& subtree, const Rational& bound,
                                          const Rational& alpha = Rational{1}) {
  if (sub.vertex_count != tree.size()) throw invalid_subpartition("subpartition and tree sizes differ");
  check_subpartition(sub);
  if (part >= sub.parts.size() || edge.part != part) throw std::invalid_argument("edge does not leave the given part");
  const auto label = sub.labels();
  if (edge.inside >= tree.size() || edge.outside >= tree.size() || label[edge.inside] != static_cast<int>(part + 1) ||
      label[edge.outside] != -1) {
    throw std::invalid_argument("not a break edge of the part");
  }
  bool adjacent = false;
  for (const auto& nb : tree.neighbors(edge.inside)) adjacent = adjacent || nb.vertex == edge.outside;
  if (!adjacent) throw std::invalid_argument("break edge endpoints are not adjacent");
  if (!std::binary_search(subtree.vertices.begin(), subtree.vertices.end(), edge.outside)) {
    throw std::invalid_argument("break edge does not enter the residue subtree");
  }
  const auto scaled = detail::scale_tree(tree, alpha);
  return detail::absorb(tree, scaled, sub, edge, subtree, detail::Threshold{bound}, alpha);
}

/// Grows parts into adjacent residue subtrees while every part keeps its
/// normalized flow within `bound`. Parts are tried in decreasing flow order;
/// any successful absorption restarts the sweep, and a full sweep without
/// change ends it.
inline Subpartition reduce_residue(const WeightedTree& tree, Subpartition sub, const Rational& bound,
                                   const Rational& alpha = Rational{1}) {
  if (subpartition_cost(tree, sub, alpha) > bound) throw std::invalid_argument("subpartition cost exceeds the bound");
  sub.normalize();
  const auto scaled = detail::scale_tree(tree, alpha);
  const detail::Threshold threshold{bound};
  for (;;) {
    const auto flows = part_flows(tree, sub, alpha);
    std::vector<std::size_t> order(sub.parts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return flows[a] > flows[b]; });
    const auto subtrees = residue_subtrees(tree, sub);
    bool changed = false;
    for (std::size_t t : order) {
      for (const auto& c : subtrees) {
        for (const auto& e : c.break_edges) {
          if (e.part != t) continue;
          auto absorbed = detail::absorb(tree, scaled, sub, e, c, threshold, alpha);
          if (absorbed.empty()) continue;
          auto& target = sub.parts[t];
          target.insert(target.end(), absorbed.begin(), absorbed.end());
          std::sort(target.begin(), target.end());
          changed = true;
          break;
        }
        if (changed) break;
      }
      if (changed) break;
    }
    if (!changed) return sub;
  }
}

/// Labels every residue vertex with the part of its nearest labeled vertex
/// along tree edges; ties go to the lower part index.
inline std::vector<int> complete_labeling(const WeightedTree& tree, const Subpartition& sub) {
  if (sub.vertex_count != tree.size()) throw invalid_subpartition("subpartition and tree sizes differ");
  std::vector<int> label = sub.labels();
  std::vector<Vertex> frontier;
  for (Vertex x = 0; x < tree.size(); ++x) {
    if (label[x] > 0) frontier.push_back(x);
  }
  if (frontier.empty()) throw std::invalid_argument("no labeled vertex to propagate from");
  std::vector<std::size_t> round(tree.size(), 0);
  std::vector<Vertex> next;
  for (std::size_t r = 1; !frontier.empty(); ++r) {
    next.clear();
    for (Vertex x : frontier) {
      for (const auto& nb : tree.neighbors(x)) {
        const Vertex y = nb.vertex;
        if (label[y] < 0) {
          label[y] = label[x];
          round[y] = r;
          next.push_back(y);
        } else if (round[y] == r && label[x] < label[y]) {
          label[y] = label[x];
        }
      }
    }
    frontier.swap(next);
  }
  return label;
}

}  // namespace isotree
