#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace isotree {

using Vertex = std::size_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Thrown when a subpartition has empty, overlapping or out-of-range parts.
class invalid_subpartition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---------------------------------------------------------------------------
// Exact quantities
// ---------------------------------------------------------------------------

/// Fixed-point value: an integer count of quanta. The quantum (2^-bits) is
/// owned by the container (graph or tree) that holds the value.
class Quantity {
 public:
  constexpr Quantity() = default;
  constexpr explicit Quantity(std::int64_t raw) : raw_(raw) {}

  [[nodiscard]] constexpr std::int64_t raw() const { return raw_; }

  constexpr Quantity& operator+=(Quantity other) {
    raw_ += other.raw_;
    return *this;
  }
  friend constexpr Quantity operator+(Quantity a, Quantity b) { return a += b; }
  friend constexpr auto operator<=>(Quantity, Quantity) = default;

 private:
  std::int64_t raw_ = 0;
};

/// Maps reals onto the 2^-bits grid. Rounding is half-up; a positive input
/// never rounds to zero.
class Quantizer {
 public:
  static constexpr int kDefaultBits = 32;
  static constexpr int kMaxBits = 52;

  constexpr Quantizer() = default;
  explicit Quantizer(int bits) : bits_(bits) {
    if (bits < 0 || bits > kMaxBits) {
      throw std::out_of_range("quantization bits must lie in [0, " + std::to_string(kMaxBits) + "]");
    }
  }

  [[nodiscard]] int bits() const { return bits_; }

  [[nodiscard]] Quantity quantize(double x) const {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("cannot quantize a non-finite value");
    }
    const double scaled = std::floor(std::ldexp(x, bits_) + 0.5);
    if (std::fabs(scaled) >= 0x1p62) {
      throw std::overflow_error("value " + std::to_string(x) + " overflows the fixed-point range");
    }
    auto raw = static_cast<std::int64_t>(scaled);
    if (x > 0.0 && raw == 0) raw = 1;
    return Quantity{raw};
  }

  [[nodiscard]] Quantity from_integer(std::int64_t value) const {
    if (value != 0 && std::abs(value) >= (std::int64_t{1} << (62 - bits_))) {
      throw std::overflow_error("integer overflows the fixed-point range");
    }
    return Quantity{value * (std::int64_t{1} << bits_)};
  }

  [[nodiscard]] double to_double(Quantity q) const { return std::ldexp(static_cast<double>(q.raw()), -bits_); }

  [[nodiscard]] Rational to_rational(Quantity q) const {
    return Rational{BigInt{q.raw()}, BigInt{1} << bits_};
  }

 private:
  int bits_ = kDefaultBits;
};

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

/// Parses "3", "-0.25", "1e-3", "2.5E2" or "3/7" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw fail();
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') negative = text[pos++] == '-';
  BigInt digits = 0;
  long long exponent = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw fail();
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') throw fail();
    const std::string rest(text.substr(pos + 1));
    std::size_t used = 0;
    long long e = 0;
    try {
      e = std::stoll(rest, &used);
    } catch (const std::exception&) {
      throw fail();
    }
    if (used != rest.size() || std::llabs(e) > 4000) throw fail();
    exponent += e;
  }
  Rational value{digits};
  if (exponent > 0) value *= Rational{boost::multiprecision::pow(BigInt{10}, static_cast<unsigned>(exponent))};
  if (exponent < 0) value /= Rational{boost::multiprecision::pow(BigInt{10}, static_cast<unsigned>(-exponent))};
  return negative ? Rational{-value} : value;
}

/// Exact binary value of a finite double.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  if (x == 0.0) return Rational{0};
  int exp = 0;
  const double mant = std::frexp(x, &exp);  // x = mant * 2^exp, |mant| in [0.5, 1)
  const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53));
  exp -= 53;
  Rational r{BigInt{scaled}};
  if (exp > 0) r *= Rational{BigInt{1} << exp};
  if (exp < 0) r /= Rational{BigInt{1} << -exp};
  return r;
}

/// Nearest double (within a couple of ulps) without overflowing on huge
/// numerators and denominators.
inline double to_double(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (num == 0) return 0.0;
  const auto top = [](const BigInt& v, long& shift) {
    const BigInt a = abs(v);
    const long msb = static_cast<long>(boost::multiprecision::msb(a));
    shift = std::max(0L, msb - 62);
    return static_cast<double>(static_cast<std::uint64_t>(a >> shift));
  };
  long ns = 0;
  long ds = 0;
  const double n = top(num, ns);
  const double d = top(den, ds);
  const double value = std::ldexp(n / d, static_cast<int>(ns - ds));
  return num < 0 ? -value : value;
}

inline std::string to_string(const Rational& r) {
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" + den.str();
}

// ---------------------------------------------------------------------------
// Data and graphs
// ---------------------------------------------------------------------------

/// n points in R^d, stored row-major, with optional class labels.
class DataSet {
 public:
  DataSet() = default;

  DataSet(std::vector<std::vector<double>> rows, std::optional<std::vector<std::string>> labels = std::nullopt) {
    if (rows.empty()) throw std::invalid_argument("no points");
    dim_ = rows.front().size();
    if (dim_ == 0) throw std::invalid_argument("points must have at least one coordinate");
    coords_.reserve(rows.size() * dim_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != dim_) {
        throw std::invalid_argument("point " + std::to_string(i) + " has dimension " + std::to_string(rows[i].size()) +
                                    ", expected " + std::to_string(dim_));
      }
      for (double c : rows[i]) {
        if (!std::isfinite(c)) throw std::invalid_argument("point " + std::to_string(i) + " has a non-finite coordinate");
        coords_.push_back(c);
      }
    }
    if (labels && labels->size() != rows.size()) {
      throw std::invalid_argument("label count does not match point count");
    }
    labels_ = std::move(labels);
  }

  [[nodiscard]] std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::span<const double> point(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  [[nodiscard]] const std::optional<std::vector<std::string>>& labels() const { return labels_; }

 private:
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  std::optional<std::vector<std::string>> labels_;
};

enum class ScalingMode { global, local };

struct GraphEdge {
  Vertex u = 0;
  Vertex v = 0;
  Quantity flow;
  double distance = 0.0;
};

/// Simple undirected graph with vertex weights, potentials and edge flows, all
/// on a common 2^-quant_bits grid. Distances stay real; they only drive the
/// spanning tree.
struct AffinityGraph {
  Quantizer quantizer;
  std::vector<Quantity> weights;
  std::vector<Quantity> potentials;
  std::vector<GraphEdge> edges;
  ScalingMode mode = ScalingMode::global;
  double sigma = 1.0;
  std::size_t nu = 0;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
};

/// First violated invariant of the graph, or nullopt when well formed.
inline std::optional<std::string> validate_graph(const AffinityGraph& graph) {
  const std::size_t n = graph.weights.size();
  if (n == 0) return "empty graph";
  if (graph.potentials.size() != n) return "potential count does not match vertex count";
  for (std::size_t x = 0; x < n; ++x) {
    if (graph.weights[x].raw() <= 0) return "nonpositive vertex weight at vertex " + std::to_string(x);
    if (graph.potentials[x].raw() < 0) return "negative potential at vertex " + std::to_string(x);
  }
  std::vector<std::pair<Vertex, Vertex>> seen;
  seen.reserve(graph.edges.size());
  for (const auto& e : graph.edges) {
    if (e.u >= n || e.v >= n) return "edge endpoint out of range";
    if (e.u == e.v) return "self-loop at vertex " + std::to_string(e.u);
    if (e.flow.raw() <= 0) {
      return "nonpositive flow on edge " + std::to_string(e.u) + "-" + std::to_string(e.v);
    }
    if (!(e.distance >= 0.0)) return "negative distance on edge " + std::to_string(e.u) + "-" + std::to_string(e.v);
    seen.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
  }
  std::sort(seen.begin(), seen.end());
  if (auto dup = std::adjacent_find(seen.begin(), seen.end()); dup != seen.end()) {
    return "parallel edge " + std::to_string(dup->first) + "-" + std::to_string(dup->second);
  }
  return std::nullopt;
}

struct TreeEdge {
  Vertex u = 0;
  Vertex v = 0;
  Quantity flow;
};

/// Rooted spanning tree carrying weights, potentials and edge flows. The
/// processing order is a reversed breadth-first order: every vertex comes
/// before its parent and the root comes last.
class WeightedTree {
 public:
  struct Neighbor {
    Vertex vertex;
    Quantity flow;
  };

  WeightedTree(std::vector<TreeEdge> edges, std::vector<Quantity> weights, std::vector<Quantity> potentials, Vertex root,
               Quantizer quantizer = Quantizer{})
      : quantizer_(quantizer), weights_(std::move(weights)), potentials_(std::move(potentials)), edges_(std::move(edges)), root_(root) {
    const std::size_t n = weights_.size();
    if (n == 0) throw std::invalid_argument("tree must have at least one vertex");
    if (potentials_.size() != n) throw std::invalid_argument("potential count does not match vertex count");
    if (root >= n) throw std::out_of_range("root " + std::to_string(root) + " is not a vertex");
    if (edges_.size() != n - 1) {
      throw std::invalid_argument("a spanning tree on " + std::to_string(n) + " vertices needs " + std::to_string(n - 1) +
                                  " edges, got " + std::to_string(edges_.size()));
    }
    for (std::size_t x = 0; x < n; ++x) {
      if (weights_[x].raw() <= 0) throw std::invalid_argument("nonpositive vertex weight at vertex " + std::to_string(x));
      if (potentials_[x].raw() < 0) throw std::invalid_argument("negative potential at vertex " + std::to_string(x));
    }

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      if (e.u >= n || e.v >= n || e.u == e.v) throw std::invalid_argument("invalid tree edge");
      if (e.flow.raw() <= 0) throw std::invalid_argument("nonpositive flow on tree edge");
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    adjacency_.resize(2 * edges_.size());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.u]++] = {e.v, e.flow};
      adjacency_[fill[e.v]++] = {e.u, e.flow};
    }

    parent_.assign(n, kNoVertex);
    parent_flow_.assign(n, Quantity{});
    std::vector<Vertex> bfs;
    bfs.reserve(n);
    std::vector<char> seen(n, 0);
    bfs.push_back(root_);
    seen[root_] = 1;
    for (std::size_t head = 0; head < bfs.size(); ++head) {
      const Vertex x = bfs[head];
      for (const auto& nb : neighbors(x)) {
        if (seen[nb.vertex]) continue;
        seen[nb.vertex] = 1;
        parent_[nb.vertex] = x;
        parent_flow_[nb.vertex] = nb.flow;
        bfs.push_back(nb.vertex);
      }
    }
    if (bfs.size() != n) throw std::invalid_argument("edges do not form a spanning tree (graph is disconnected)");
    order_.assign(bfs.rbegin(), bfs.rend());
  }

  [[nodiscard]] std::size_t size() const { return weights_.size(); }
  [[nodiscard]] Vertex root() const { return root_; }
  [[nodiscard]] const Quantizer& quantizer() const { return quantizer_; }
  [[nodiscard]] Quantity weight(Vertex x) const { return weights_[x]; }
  [[nodiscard]] Quantity potential(Vertex x) const { return potentials_[x]; }
  [[nodiscard]] Vertex parent(Vertex x) const { return parent_[x]; }
  /// Flow of the edge to the parent; zero at the root.
  [[nodiscard]] Quantity parent_flow(Vertex x) const { return parent_flow_[x]; }
  [[nodiscard]] std::span<const Vertex> processing_order() const { return order_; }
  [[nodiscard]] std::span<const TreeEdge> edges() const { return edges_; }
  [[nodiscard]] std::span<const Quantity> weights() const { return weights_; }
  [[nodiscard]] std::span<const Quantity> potentials() const { return potentials_; }
  [[nodiscard]] std::span<const Neighbor> neighbors(Vertex x) const {
    return {adjacency_.data() + offsets_[x], offsets_[x + 1] - offsets_[x]};
  }

  [[nodiscard]] WeightedTree rerooted(Vertex new_root) const {
    return WeightedTree(edges_, weights_, potentials_, new_root, quantizer_);
  }

  [[nodiscard]] WeightedTree with_potentials(std::vector<Quantity> potentials) const {
    return WeightedTree(edges_, weights_, std::move(potentials), root_, quantizer_);
  }

 private:
  Quantizer quantizer_;
  std::vector<Quantity> weights_;
  std::vector<Quantity> potentials_;
  std::vector<TreeEdge> edges_;
  Vertex root_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
  std::vector<Vertex> parent_;
  std::vector<Quantity> parent_flow_;
  std::vector<Vertex> order_;
};

// ---------------------------------------------------------------------------
// Subpartitions and the cost function
// ---------------------------------------------------------------------------

/// k pairwise-disjoint nonempty vertex sets over a vertex range [0, n). Part
/// i carries label i + 1; vertices outside every part are residue.
struct Subpartition {
  std::size_t vertex_count = 0;
  std::vector<std::vector<Vertex>> parts;

  [[nodiscard]] std::size_t size() const { return parts.size(); }

  /// Part label per vertex (1-based), -1 for residue elements.
  [[nodiscard]] std::vector<int> labels() const {
    std::vector<int> out(vertex_count, -1);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (Vertex x : parts[i]) out[x] = static_cast<int>(i + 1);
    }
    return out;
  }

  [[nodiscard]] std::vector<Vertex> residue() const {
    const auto lab = labels();
    std::vector<Vertex> out;
    for (Vertex x = 0; x < vertex_count; ++x) {
      if (lab[x] < 0) out.push_back(x);
    }
    return out;
  }

  [[nodiscard]] std::size_t residue_number() const {
    std::size_t covered = 0;
    for (const auto& p : parts) covered += p.size();
    return vertex_count - covered;
  }

  /// Sorts each part; part order is kept.
  void normalize() {
    for (auto& p : parts) std::sort(p.begin(), p.end());
  }

  friend bool operator==(const Subpartition&, const Subpartition&) = default;
};

inline void check_subpartition(const Subpartition& sub) {
  std::vector<char> used(sub.vertex_count, 0);
  for (std::size_t i = 0; i < sub.parts.size(); ++i) {
    if (sub.parts[i].empty()) throw invalid_subpartition("part " + std::to_string(i + 1) + " is empty");
    for (Vertex x : sub.parts[i]) {
      if (x >= sub.vertex_count) throw invalid_subpartition("vertex " + std::to_string(x) + " is out of range");
      if (used[x]) throw invalid_subpartition("vertex " + std::to_string(x) + " appears in more than one part");
      used[x] = 1;
    }
  }
}

/// (phi(boundary A) + alpha * p(A)) / omega(A), exact.
inline Rational normalized_flow(const WeightedTree& tree, std::span<const Vertex> part, const Rational& alpha) {
  if (part.empty()) throw invalid_subpartition("normalized flow of an empty set");
  std::vector<char> inside(tree.size(), 0);
  for (Vertex x : part) {
    if (x >= tree.size()) throw invalid_subpartition("vertex " + std::to_string(x) + " is out of range");
    inside[x] = 1;
  }
  BigInt boundary = 0;
  BigInt potential = 0;
  BigInt weight = 0;
  for (Vertex x : part) {
    weight += tree.weight(x).raw();
    potential += tree.potential(x).raw();
    for (const auto& nb : tree.neighbors(x)) {
      if (!inside[nb.vertex]) boundary += nb.flow.raw();
    }
  }
  return (Rational{boundary} + alpha * Rational{potential}) / Rational{weight};
}

inline std::vector<Rational> part_flows(const WeightedTree& tree, const Subpartition& sub, const Rational& alpha) {
  if (sub.vertex_count != tree.size()) throw invalid_subpartition("subpartition and tree sizes differ");
  check_subpartition(sub);
  std::vector<Rational> flows;
  flows.reserve(sub.parts.size());
  for (const auto& part : sub.parts) flows.push_back(normalized_flow(tree, part, alpha));
  return flows;
}

/// max over parts of the normalized flow.
inline Rational subpartition_cost(const WeightedTree& tree, const Subpartition& sub, const Rational& alpha) {
  if (sub.parts.empty()) throw invalid_subpartition("subpartition has no parts");
  const auto flows = part_flows(tree, sub, alpha);
  return *std::max_element(flows.begin(), flows.end());
}

/// True when every part induces a connected subtree.
inline bool parts_connected(const WeightedTree& tree, const Subpartition& sub) {
  std::vector<int> label = sub.labels();
  std::vector<char> seen(tree.size(), 0);
  std::vector<Vertex> stack;
  for (std::size_t i = 0; i < sub.parts.size(); ++i) {
    const auto& part = sub.parts[i];
    if (part.empty()) continue;
    std::size_t reached = 0;
    stack.assign(1, part.front());
    seen[part.front()] = 1;
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      ++reached;
      for (const auto& nb : tree.neighbors(x)) {
        if (!seen[nb.vertex] && label[nb.vertex] == static_cast<int>(i + 1)) {
          seen[nb.vertex] = 1;
          stack.push_back(nb.vertex);
        }
      }
    }
    if (reached != part.size()) return false;
  }
  return true;
}

}  // namespace isotree
