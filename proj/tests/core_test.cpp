#include <gtest/gtest.h>

#include "isotree/core.hpp"
#include "support/fixtures.hpp"

namespace isotree {
namespace {

using testing::make_tree;
using testing::unit_path;

Subpartition sub(std::size_t n, std::vector<std::vector<Vertex>> parts) { return {n, std::move(parts)}; }

TEST(Quantizer, RoundsHalfUpOnTheGrid) {
  const Quantizer q{2};
  EXPECT_EQ(q.quantize(1.0).raw(), 4);
  EXPECT_EQ(q.quantize(0.375).raw(), 2);  // 1.5 quanta rounds up
  EXPECT_EQ(q.quantize(0.1).raw(), 1);
  EXPECT_EQ(q.quantize(0.0).raw(), 0);
  EXPECT_DOUBLE_EQ(q.to_double(Quantity{6}), 1.5);
  EXPECT_EQ(q.to_rational(Quantity{6}), Rational(3, 2));
}

TEST(Quantizer, PositiveValuesNeverVanish) {
  const Quantizer q{32};
  EXPECT_EQ(q.quantize(1e-300).raw(), 1);
  EXPECT_EQ(q.quantize(std::exp(-70.0)).raw(), 1);
}

TEST(Quantizer, RejectsBadInput) {
  EXPECT_THROW(Quantizer{-1}, std::out_of_range);
  EXPECT_THROW(Quantizer{53}, std::out_of_range);
  EXPECT_THROW((void)Quantizer{}.quantize(std::nan("")), std::invalid_argument);
  EXPECT_THROW((void)Quantizer{32}.quantize(1e12), std::overflow_error);
}

TEST(Rationals, ParseDecimalFractionAndExponent) {
  EXPECT_EQ(parse_rational("3"), Rational(3));
  EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parse_rational("2.5E2"), Rational(250));
  EXPECT_EQ(parse_rational("3/7"), Rational(3, 7));
  EXPECT_EQ(parse_rational("0.1"), Rational(1, 10));
  for (const char* bad : {"", "abc", "1/0", "1.2.3", "1e", "--1"}) EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
}

TEST(Rationals, DoubleConversions) {
  EXPECT_EQ(rational_from_double(0.5), Rational(1, 2));
  EXPECT_EQ(rational_from_double(-3.0), Rational(-3));
  EXPECT_DOUBLE_EQ(to_double(Rational(1, 3)), 1.0 / 3.0);
  const Rational huge{BigInt{1} << 400, (BigInt{1} << 399) + 1};
  EXPECT_NEAR(to_double(huge), 2.0, 1e-12);
  EXPECT_EQ(to_string(Rational(1, 14)), "1/14");
  EXPECT_EQ(to_string(Rational(4, 2)), "2");
}

TEST(DataSet, RejectsMalformedRows) {
  EXPECT_THROW(DataSet(std::vector<std::vector<double>>{}), std::invalid_argument);
  EXPECT_THROW(DataSet({{1.0, 2.0}, {1.0}}), std::invalid_argument);
  EXPECT_THROW(DataSet({{1.0}}, std::vector<std::string>{"a", "b"}), std::invalid_argument);
  const DataSet d({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 2u);
  EXPECT_EQ(d.point(1)[0], 3.0);
}

AffinityGraph path_graph() {
  AffinityGraph g;
  g.quantizer = Quantizer{0};
  g.weights = testing::quantities({1, 2, 1});
  g.potentials = testing::quantities({0, 0, 0});
  g.edges = {{0, 1, Quantity{1}, 1.0}, {1, 2, Quantity{1}, 1.0}};
  return g;
}

TEST(ValidateGraph, AcceptsWellFormedPath) { EXPECT_FALSE(validate_graph(path_graph()).has_value()); }

TEST(ValidateGraph, ReportsNonpositiveFlow) {
  auto g = path_graph();
  g.edges[0].flow = Quantity{0};
  const auto v = validate_graph(g);
  ASSERT_TRUE(v);
  EXPECT_NE(v->find("nonpositive flow"), std::string::npos);
}

TEST(ValidateGraph, ReportsNegativePotential) {
  auto g = path_graph();
  g.potentials[2] = Quantity{-1};
  const auto v = validate_graph(g);
  ASSERT_TRUE(v);
  EXPECT_NE(v->find("negative potential"), std::string::npos);
}

TEST(ValidateGraph, ReportsSelfLoopsAndParallelEdges) {
  auto g = path_graph();
  g.edges.push_back({1, 1, Quantity{1}, 0.0});
  EXPECT_NE(validate_graph(g)->find("self-loop"), std::string::npos);
  g = path_graph();
  g.edges.push_back({1, 0, Quantity{1}, 0.0});
  EXPECT_NE(validate_graph(g)->find("parallel edge"), std::string::npos);
}

TEST(WeightedTree, PathRootedAtEndpointProcessesFarEndFirst) {
  const auto t = unit_path(4, 0);
  const auto order = t.processing_order();
  ASSERT_EQ(order.size(), 4u);
  EXPECT_EQ(order.front(), 3u);
  EXPECT_EQ(order.back(), 0u);
  EXPECT_EQ(t.parent(3), 2u);
  EXPECT_EQ(t.parent(0), kNoVertex);
}

TEST(WeightedTree, StarRootedAtCentreProcessesLeavesFirst) {
  const auto t = testing::hardness_star();
  const auto order = t.processing_order();
  EXPECT_EQ(order.back(), 0u);
  for (std::size_t i = 0; i + 1 < order.size(); ++i) EXPECT_EQ(t.parent(order[i]), 0u);
}

TEST(WeightedTree, ChildrenPrecedeParents) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = testing::random_tree(rng);
    std::vector<std::size_t> position(t.size());
    const auto order = t.processing_order();
    for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;
    std::size_t roots = 0;
    for (Vertex x = 0; x < t.size(); ++x) {
      if (t.parent(x) == kNoVertex) {
        ++roots;
        EXPECT_EQ(x, t.root());
      } else {
        EXPECT_LT(position[x], position[t.parent(x)]);
      }
    }
    EXPECT_EQ(roots, 1u);
    EXPECT_EQ(order.back(), t.root());
  }
}

TEST(WeightedTree, RejectsNonTrees) {
  using testing::Edge;
  EXPECT_THROW(make_tree({{0, 1, 1}}, {1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(make_tree({{0, 1, 1}, {0, 1, 1}}, {1, 1, 1}), std::invalid_argument);
  EXPECT_THROW(make_tree({{0, 1, 0}}, {1, 1}), std::invalid_argument);
  EXPECT_THROW(make_tree({{0, 1, 1}}, {1, 0}), std::invalid_argument);
  EXPECT_THROW(make_tree({{0, 1, 1}}, {1, 1}, {0, -1}), std::invalid_argument);
  EXPECT_THROW(make_tree({{0, 1, 1}}, {1, 1}, {}, 2), std::out_of_range);
}

TEST(WeightedTree, RerootingKeepsData) {
  const auto t = unit_path(4, 0).rerooted(3);
  EXPECT_EQ(t.root(), 3u);
  EXPECT_EQ(t.processing_order().front(), 0u);
}

TEST(SubpartitionCost, BalancedPathCut) {
  EXPECT_EQ(subpartition_cost(unit_path(4), sub(4, {{0, 1}, {2, 3}}), 1), Rational(1, 2));
}

TEST(SubpartitionCost, WholeTreeWithoutPotentialIsZero) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    auto t = testing::random_tree(rng);
    t = t.with_potentials(std::vector<Quantity>(t.size()));
    std::vector<Vertex> all(t.size());
    std::iota(all.begin(), all.end(), Vertex{0});
    EXPECT_EQ(subpartition_cost(t, sub(t.size(), {all}), 1), 0);
  }
}

TEST(SubpartitionCost, PotentialsEnterScaledByAlpha) {
  const auto t = testing::p3_fixture();
  EXPECT_EQ(subpartition_cost(t, sub(3, {{0}, {1, 2}}), 1), Rational(11, 2));
  EXPECT_EQ(subpartition_cost(t, sub(3, {{0}, {1, 2}}), Rational(1, 10)), 1);
}

TEST(SubpartitionCost, InvariantUnderPartOrder) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto t = testing::random_tree(rng);
    Subpartition s{t.size(), {{}, {}}};
    for (Vertex x = 0; x < t.size(); ++x) {
      if (x % 3 != 2) s.parts[x % 3].push_back(x);
    }
    Subpartition swapped{t.size(), {s.parts[1], s.parts[0]}};
    EXPECT_EQ(subpartition_cost(t, s, Rational(1, 2)), subpartition_cost(t, swapped, Rational(1, 2)));
  }
}

TEST(SubpartitionCost, RejectsInvalidSubpartitions) {
  const auto t = unit_path(4);
  EXPECT_THROW(subpartition_cost(t, sub(4, {{0}, {}}), 1), invalid_subpartition);
  EXPECT_THROW(subpartition_cost(t, sub(4, {{0, 1}, {1}}), 1), invalid_subpartition);
  EXPECT_THROW(subpartition_cost(t, sub(4, {{0}, {4}}), 1), invalid_subpartition);
  EXPECT_THROW(subpartition_cost(t, sub(3, {{0}, {1}}), 1), invalid_subpartition);
}

TEST(Subpartition, LabelsAndResidue) {
  const auto s = sub(5, {{3, 1}, {0}});
  EXPECT_EQ(s.labels(), (std::vector<int>{2, 1, -1, 1, -1}));
  EXPECT_EQ(s.residue(), (std::vector<Vertex>{2, 4}));
  EXPECT_EQ(s.residue_number(), 2u);
}

TEST(Subpartition, Connectivity) {
  const auto t = unit_path(4);
  EXPECT_TRUE(parts_connected(t, sub(4, {{0, 1}, {3}})));
  EXPECT_FALSE(parts_connected(t, sub(4, {{0, 2}, {3}})));
}

}  // namespace
}  // namespace isotree
