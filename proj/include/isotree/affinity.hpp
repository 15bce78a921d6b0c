#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "isotree/core.hpp"

namespace isotree {

/// How an edge's distance d becomes a flow.
enum class Kernel {
  /// exp(-d / (2 sigma^2))
  distance_over_two_sigma_squared,
  /// exp(-d / sigma), the benchmark convention
  distance_over_sigma,
  /// exp(-d^2 / (2 sigma^2)), the usual Gaussian
  squared_distance,
};

struct ScalingSpec {
  ScalingMode mode = ScalingMode::global;
  double sigma = 1.0;
  std::size_t nu = 7;
  Kernel kernel = Kernel::distance_over_sigma;
  /// Local mode only: per-point scales sigma_i = distance to the nu-th
  /// neighbour, flow exp(-d^2 / (sigma_i sigma_j)).
  bool self_tuning = false;
};

inline double pairwise_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double kernel_flow(Kernel kernel, double distance, double sigma) {
  switch (kernel) {
    case Kernel::distance_over_two_sigma_squared:
      return std::exp(-distance / (2.0 * sigma * sigma));
    case Kernel::distance_over_sigma:
      return std::exp(-distance / sigma);
    case Kernel::squared_distance:
      return std::exp(-distance * distance / (2.0 * sigma * sigma));
  }
  throw std::invalid_argument("unknown kernel");
}

namespace detail {

/// Symmetric n x n distance matrix, row-major.
inline std::vector<double> distance_matrix(const DataSet& data) {
  const std::size_t n = data.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pairwise_distance(data.point(i), data.point(j));
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  return dist;
}

/// Vertex weights as the ascending-index sum of incident quantized flows.
inline void accumulate_weights(AffinityGraph& graph) {
  graph.weights.assign(graph.potentials.size(), Quantity{});
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
  for (const auto& e : graph.edges) {
    graph.weights[e.u] += e.flow;
    graph.weights[e.v] += e.flow;
  }
}

}  // namespace detail

/// Complete affinity graph: one flow per pair, vertex weight = sum of incident
/// flows (the j = i term is excluded), zero potentials.
inline AffinityGraph global_affinity(const DataSet& data, double sigma, Kernel kernel = Kernel::distance_over_sigma,
                                     Quantizer quantizer = Quantizer{}) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("global affinity needs at least two points");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  AffinityGraph graph;
  graph.quantizer = quantizer;
  graph.mode = ScalingMode::global;
  graph.sigma = sigma;
  graph.nu = n - 1;
  graph.potentials.assign(n, Quantity{});
  graph.edges.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pairwise_distance(data.point(i), data.point(j));
      graph.edges.push_back({i, j, quantizer.quantize(kernel_flow(kernel, d, sigma)), d});
    }
  }
  detail::accumulate_weights(graph);
  return graph;
}

/// Symmetric nu-nearest-neighbour graph: i and j are joined when either lists
/// the other among its nu nearest points. Distance ties go to the lower index.
inline AffinityGraph local_affinity(const DataSet& data, std::size_t nu, double sigma,
                                    Kernel kernel = Kernel::distance_over_sigma, Quantizer quantizer = Quantizer{},
                                    bool self_tuning = false) {
  const std::size_t n = data.size();
  if (nu < 1 || nu >= n) {
    throw std::out_of_range("neighbour count nu=" + std::to_string(nu) + " must lie in [1, " + std::to_string(n) + ")");
  }
  if (!self_tuning && !(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");

  const auto dist = detail::distance_matrix(data);
  std::vector<char> adjacent(n * n, 0);
  std::vector<double> scale(n, 0.0);
  std::vector<Vertex> others;
  for (std::size_t i = 0; i < n; ++i) {
    others.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    auto closer = [&](Vertex a, Vertex b) {
      const double da = dist[i * n + a];
      const double db = dist[i * n + b];
      return da != db ? da < db : a < b;
    };
    std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(nu), others.end(), closer);
    for (std::size_t r = 0; r < nu; ++r) {
      const Vertex j = others[r];
      adjacent[i * n + j] = 1;
      adjacent[j * n + i] = 1;
    }
    scale[i] = dist[i * n + others[nu - 1]];
  }

  AffinityGraph graph;
  graph.quantizer = quantizer;
  graph.mode = ScalingMode::local;
  graph.sigma = sigma;
  graph.nu = nu;
  graph.potentials.assign(n, Quantity{});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!adjacent[i * n + j]) continue;
      const double d = dist[i * n + j];
      double flow = 0.0;
      if (self_tuning) {
        const double s = scale[i] * scale[j];
        flow = s > 0.0 ? std::exp(-d * d / s) : (d == 0.0 ? 1.0 : 0.0);
      } else {
        flow = kernel_flow(kernel, d, sigma);
      }
      // Flows that underflow still keep the edge: quantize clamps positive
      // values to one quantum, and a zero flow is lifted the same way.
      graph.edges.push_back({i, j, flow > 0.0 ? quantizer.quantize(flow) : Quantity{1}, d});
    }
  }
  detail::accumulate_weights(graph);
  return graph;
}

inline AffinityGraph build_affinity(const DataSet& data, const ScalingSpec& spec, Quantizer quantizer = Quantizer{}) {
  if (spec.mode == ScalingMode::global) return global_affinity(data, spec.sigma, spec.kernel, quantizer);
  return local_affinity(data, spec.nu, spec.sigma, spec.kernel, quantizer, spec.self_tuning);
}

/// p(x) = (1/n) sum_y |x - y|, including the zero y = x term.
inline std::vector<double> mean_distance_potential(const DataSet& data) {
  const std::size_t n = data.size();
  std::vector<double> potential(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += pairwise_distance(data.point(i), data.point(j));
    }
    potential[i] = sum / static_cast<double>(n);
  }
  return potential;
}

inline std::vector<Quantity> quantize_all(std::span<const double> values, const Quantizer& quantizer) {
  std::vector<Quantity> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(quantizer.quantize(v));
  return out;
}

}  // namespace isotree
