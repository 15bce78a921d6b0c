#include <gtest/gtest.h>

#include <random>

#include "isotree/affinity.hpp"
#include "isotree/spanning_tree.hpp"

namespace isotree {
namespace {

std::vector<std::pair<Vertex, Vertex>> edge_pairs(const AffinityGraph& g, const std::vector<std::size_t>& idx) {
  std::vector<std::pair<Vertex, Vertex>> out;
  for (auto i : idx) out.emplace_back(std::min(g.edges[i].u, g.edges[i].v), std::max(g.edges[i].u, g.edges[i].v));
  std::sort(out.begin(), out.end());
  return out;
}

double total_distance(const AffinityGraph& g, const std::vector<std::size_t>& idx) {
  double sum = 0;
  for (auto i : idx) sum += g.edges[i].distance;
  return sum;
}

// O(n^2) Prim on the complete distance matrix, independent of the library's Kruskal.
double prim_weight(const DataSet& data) {
  const std::size_t n = data.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<char> in(n, 0);
  best[0] = 0;
  double total = 0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v] && (u == n || best[v] < best[u])) u = v;
    }
    in[u] = 1;
    total += best[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (!in[v]) best[v] = std::min(best[v], pairwise_distance(data.point(u), data.point(v)));
    }
  }
  return total;
}

TEST(MinimumSpanningTree, CollinearTriple) {
  const auto g = global_affinity(DataSet({{0}, {1}, {3}}), 1.0);
  const auto mst = minimum_spanning_tree(g);
  EXPECT_EQ(edge_pairs(g, mst), (std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {1, 2}}));
}

TEST(MinimumSpanningTree, UnitSquareTieBreakIsLexicographic) {
  const auto g = global_affinity(DataSet({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 1.0);
  const auto mst = minimum_spanning_tree(g);
  EXPECT_EQ(edge_pairs(g, mst), (std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {0, 3}, {1, 2}}));
}

TEST(MinimumSpanningTree, TwoPoints) {
  const auto g = global_affinity(DataSet({{0}, {1}}), 1.0);
  EXPECT_EQ(minimum_spanning_tree(g).size(), 1u);
}

TEST(MinimumSpanningTree, MatchesPrimOnRandomPoints) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> coord(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> rows(30, std::vector<double>(3));
    for (auto& r : rows) {
      for (auto& c : r) c = coord(rng);
    }
    const DataSet data(rows);
    const auto g = global_affinity(data, 1.0);
    const auto mst = minimum_spanning_tree(g);
    EXPECT_EQ(mst.size(), data.size() - 1);
    EXPECT_NEAR(total_distance(g, mst), prim_weight(data), 1e-9);
  }
}

TEST(MinimumSpanningTree, DisconnectedGraphReportsComponents) {
  const auto g = local_affinity(DataSet({{0}, {1}, {100}, {101}}), 1, 1.0);
  try {
    minimum_spanning_tree(g);
    FAIL() << "expected disconnected_graph";
  } catch (const disconnected_graph& e) {
    EXPECT_EQ(e.components().size(), 2u);
    EXPECT_EQ(e.components()[0], (std::vector<Vertex>{0, 1}));
  }
}

TEST(BuildWeightedTree, InheritsGraphWeightsAndRootsAtHeaviestVertex) {
  const auto g = global_affinity(DataSet({{0}, {1}, {3}}), 1.0);
  const auto tree = build_weighted_tree(minimum_spanning_tree(g), g);
  EXPECT_EQ(tree.root(), 1u);  // middle point has the largest weight
  for (Vertex x = 0; x < 3; ++x) EXPECT_EQ(tree.weight(x), g.weights[x]);
  EXPECT_EQ(tree.processing_order().back(), 1u);
}

TEST(BuildWeightedTree, RootOverrideAndRecomputedWeights) {
  const auto g = global_affinity(DataSet({{0}, {1}, {3}}), 1.0);
  const auto mst = minimum_spanning_tree(g);
  const auto tree = build_weighted_tree(mst, g, TreeOptions{Vertex{0}, true});
  EXPECT_EQ(tree.root(), 0u);
  EXPECT_EQ(tree.processing_order().front(), 2u);
  EXPECT_EQ(tree.weight(0), tree.parent_flow(1));
  EXPECT_THROW(build_weighted_tree(mst, g, TreeOptions{Vertex{3}, false}), std::out_of_range);
}

TEST(BuildWeightedTree, OneRootAndParentPerOtherVertex) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::vector<std::vector<double>> rows(40, std::vector<double>(2));
  for (auto& r : rows) {
    for (auto& c : r) c = coord(rng);
  }
  const auto g = local_affinity(DataSet(rows), 6, 1.0);
  const auto tree = build_weighted_tree(minimum_spanning_tree(g), g);
  std::size_t roots = 0;
  for (Vertex x = 0; x < tree.size(); ++x) roots += tree.parent(x) == kNoVertex ? 1 : 0;
  EXPECT_EQ(roots, 1u);
}

}  // namespace
}  // namespace isotree
