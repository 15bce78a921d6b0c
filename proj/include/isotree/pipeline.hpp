#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "isotree/affinity.hpp"
#include "isotree/core.hpp"
#include "isotree/outlier.hpp"
#include "isotree/postprocess.hpp"
#include "isotree/solver.hpp"
#include "isotree/spanning_tree.hpp"

namespace isotree {

enum class Normalization { none, min_max };

/// Rescales every coordinate to [0, 1]; constant coordinates become 0.
inline DataSet normalize_min_max(const DataSet& data) {
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  std::vector<double> lo(d, std::numeric_limits<double>::infinity());
  std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = data.point(i);
    for (std::size_t c = 0; c < d; ++c) {
      lo[c] = std::min(lo[c], p[c]);
      hi[c] = std::max(hi[c], p[c]);
    }
  }
  std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = data.point(i);
    for (std::size_t c = 0; c < d; ++c) rows[i][c] = hi[c] > lo[c] ? (p[c] - lo[c]) / (hi[c] - lo[c]) : 0.0;
  }
  return DataSet(std::move(rows), data.labels());
}

struct PipelineConfig {
  std::size_t k = 2;
  ScalingSpec scaling;
  Normalization normalization = Normalization::none;
  int quant_bits = Quantizer::kDefaultBits;
  std::optional<Vertex> root;
  bool recompute_weights = false;
  bool postprocess = true;
};

/// Affinity graph, Euclidean minimum spanning tree, weighted tree carrying
/// mean-distance potentials.
inline WeightedTree build_tree(const DataSet& raw, const PipelineConfig& config) {
  const DataSet data = config.normalization == Normalization::min_max ? normalize_min_max(raw) : raw;
  const Quantizer quantizer{config.quant_bits};
  AffinityGraph graph = build_affinity(data, config.scaling, quantizer);
  graph.potentials = quantize_all(mean_distance_potential(data), quantizer);
  if (auto violation = validate_graph(graph)) throw std::runtime_error("invalid affinity graph: " + *violation);
  const auto mst = minimum_spanning_tree(graph);
  return build_weighted_tree(mst, graph, TreeOptions{config.root, config.recompute_weights});
}

struct ClusterConfig : PipelineConfig {
  Rational alpha = 0;
  bool complete_labels = false;
};

struct ClusterReport {
  Rational miso;
  Subpartition subpartition;
  std::vector<Rational> part_flows;
  std::vector<int> labels;
  std::size_t residue_count = 0;
  std::size_t residue_before_postprocess = 0;
  Vertex root = 0;
};

inline ClusterReport run_cluster(const DataSet& data, const ClusterConfig& config) {
  if (config.k < 2 || config.k > data.size()) {
    throw std::out_of_range("k=" + std::to_string(config.k) + " must lie in [2, " + std::to_string(data.size()) + "]");
  }
  const WeightedTree tree = build_tree(data, config);
  auto solution = solve_miso(tree, config.k, config.alpha);
  ClusterReport report;
  report.miso = solution.value;
  report.root = tree.root();
  report.residue_before_postprocess = solution.minimizer.residue_number();
  report.subpartition = config.postprocess ? reduce_residue(tree, std::move(solution.minimizer), solution.value, config.alpha)
                                           : std::move(solution.minimizer);
  // Clusters are numbered by their smallest point.
  report.subpartition.normalize();
  std::sort(report.subpartition.parts.begin(), report.subpartition.parts.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  report.part_flows = part_flows(tree, report.subpartition, config.alpha);
  report.residue_count = report.subpartition.residue_number();
  report.labels = config.complete_labels ? complete_labeling(tree, report.subpartition) : report.subpartition.labels();
  return report;
}

inline nlohmann::ordered_json summary_json(const ClusterReport& report) {
  nlohmann::ordered_json out;
  out["miso"] = to_string(report.miso);
  out["miso_decimal"] = to_double(report.miso);
  out["residue_count"] = report.residue_count;
  out["residue_count_before_postprocess"] = report.residue_before_postprocess;
  out["root"] = report.root;
  auto& parts = out["parts"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < report.subpartition.parts.size(); ++i) {
    parts.push_back({{"label", i + 1},
                     {"size", report.subpartition.parts[i].size()},
                     {"flow", to_string(report.part_flows[i])},
                     {"flow_decimal", to_double(report.part_flows[i])}});
  }
  return out;
}

struct ProfileConfig : PipelineConfig {
  double sigma_s = 0.5;
  Rational epsilon = Rational{1, 100};
  std::optional<Rational> alpha_max;
};

struct ProfileReport {
  OutlierProfile profile;
  AlphaStar alpha_star;
  std::vector<Vertex> outliers;
};

inline ProfileReport run_profile(const DataSet& data, const ProfileConfig& config) {
  if (config.k < 2 || config.k > data.size()) {
    throw std::out_of_range("k=" + std::to_string(config.k) + " must lie in [2, " + std::to_string(data.size()) + "]");
  }
  const WeightedTree tree = build_tree(data, config);
  const Rational alpha_max = config.alpha_max ? *config.alpha_max : choose_alpha_max(tree, config.k, config.postprocess);
  ProfileReport report;
  report.profile = outlier_profile(tree, config.k, alpha_max, config.epsilon, config.sigma_s, config.postprocess);
  report.alpha_star = select_alpha_star(report.profile);
  report.outliers = outlier_set(report.profile, report.alpha_star.alpha);
  return report;
}

inline nlohmann::ordered_json profile_json(const ProfileReport& report) {
  const auto& p = report.profile;
  nlohmann::ordered_json out;
  out["k"] = p.k;
  out["sigma_s"] = p.sigma_s;
  out["epsilon"] = to_double(p.epsilon);
  out["alpha_max"] = to_double(p.alpha_max);
  auto& intervals = out["intervals"] = nlohmann::ordered_json::array();
  for (const auto& iv : p.intervals) {
    intervals.push_back({{"alpha_low", to_double(iv.low)},
                         {"alpha_high", to_double(iv.high)},
                         {"residue_count", iv.residue_count},
                         {"sm", iv.sm},
                         {"non_monotone", iv.non_monotone}});
  }
  out["alpha_star"] = to_double(report.alpha_star.alpha);
  out["alpha_star_interval"] = report.alpha_star.interval;
  out["outliers"] = report.outliers;
  return out;
}

}  // namespace isotree
