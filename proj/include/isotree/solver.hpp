#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isotree/core.hpp"

namespace isotree {

namespace detail {

__extension__ using Wide = __int128;

inline BigInt to_big(Wide v) {
  const bool negative = v < 0;
  unsigned __int128 mag = negative ? static_cast<unsigned __int128>(-(v + 1)) + 1 : static_cast<unsigned __int128>(v);
  BigInt out = static_cast<std::uint64_t>(mag >> 64);
  out <<= 64;
  out += static_cast<std::uint64_t>(mag);
  return negative ? BigInt{-out} : out;
}

inline Wide to_wide(const BigInt& v) {
  // Callers guard magnitudes well below 2^126.
  const BigInt mag = abs(v);
  const auto hi = static_cast<std::uint64_t>(mag >> 64);
  const auto lo = static_cast<std::uint64_t>(mag & BigInt{std::numeric_limits<std::uint64_t>::max()});
  const Wide out = (static_cast<Wide>(hi) << 64) | static_cast<Wide>(lo);
  return v < 0 ? -out : out;
}

/// Tree weights rescaled to coprime integers for one value of alpha:
/// omega' = b omega, phi' = b phi, p' = a p for alpha = a/b, divided by the
/// gcd of everything. Normalized flows are unchanged by the rescaling.
struct ScaledTree {
  std::vector<Wide> weight;
  std::vector<Wide> potential;
  std::vector<Wide> parent_flow;
  Wide weight_total = 0;
  Wide weight_min = 0;
  Wide flow_total = 0;
  Wide flow_min = 0;
  Wide potential_total = 0;
  Wide potential_min = 0;
  // The same values laid out by processing position, so the decision pass
  // walks memory sequentially.
  std::vector<Vertex> vertex_at;
  std::vector<std::size_t> parent_at;  // kNoVertex at the root
  std::vector<Wide> weight_at;
  std::vector<Wide> potential_at;
  std::vector<Wide> flow_at;
};

inline constexpr unsigned kMaxScaledBits = 100;

inline ScaledTree scale_tree(const WeightedTree& tree, const Rational& alpha) {
  if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
  const std::size_t n = tree.size();
  const BigInt a = boost::multiprecision::numerator(alpha);
  const BigInt b = boost::multiprecision::denominator(alpha);

  std::int64_t g_base = 0;  // gcd of weights and flows
  std::int64_t g_pot = 0;   // gcd of potentials
  for (Vertex x = 0; x < n; ++x) {
    g_base = std::gcd(g_base, tree.weight(x).raw());
    g_pot = std::gcd(g_pot, tree.potential(x).raw());
  }
  for (const auto& e : tree.edges()) g_base = std::gcd(g_base, e.flow.raw());
  BigInt g = gcd(b * g_base, a * g_pot);
  if (g == 0) g = 1;

  // Every raw weight and flow is a multiple of g_base and every potential a
  // multiple of g_pot, so scaled values are integer multiples of these.
  const BigInt base_unit = b * g_base / g;
  const BigInt pot_unit = a * g_pot / g;
  if (base_unit > std::numeric_limits<std::int64_t>::max() || pot_unit > std::numeric_limits<std::int64_t>::max()) {
    throw std::overflow_error("alpha has too many digits for exact search");
  }
  const auto mb = static_cast<Wide>(static_cast<std::int64_t>(base_unit));
  const auto mp = static_cast<Wide>(static_cast<std::int64_t>(pot_unit));
  const Wide limit = Wide{1} << kMaxScaledBits;

  ScaledTree out;
  out.weight.resize(n);
  out.potential.resize(n);
  out.parent_flow.resize(n);
  // Each term is below 2^125 and each partial sum is checked against 2^100,
  // so nothing here can overflow 128 bits.
  auto accumulate = [&](Wide& total, Wide value, const char* what) {
    total += value;
    if (total >= limit) {
      throw std::overflow_error(std::string("tree ") + what + " too large for exact search; lower the quantization bits");
    }
  };
  Wide flow_and_potential = 0;
  for (Vertex x = 0; x < n; ++x) {
    out.weight[x] = mb * (tree.weight(x).raw() / g_base);
    out.potential[x] = g_pot == 0 ? Wide{0} : mp * (tree.potential(x).raw() / g_pot);
    out.parent_flow[x] = mb * (tree.parent_flow(x).raw() / g_base);
    accumulate(out.weight_total, out.weight[x], "weights");
    accumulate(out.potential_total, out.potential[x], "potentials");
    accumulate(out.flow_total, out.parent_flow[x], "flows");
    accumulate(flow_and_potential, out.potential[x] + out.parent_flow[x], "flows and potentials");
  }
  out.weight_min = *std::min_element(out.weight.begin(), out.weight.end());
  out.potential_min = *std::min_element(out.potential.begin(), out.potential.end());
  const auto order = tree.processing_order();
  std::vector<std::size_t> position(n);
  for (std::size_t i = 0; i < n; ++i) position[order[i]] = i;
  out.vertex_at.assign(order.begin(), order.end());
  out.parent_at.resize(n);
  out.weight_at.resize(n);
  out.potential_at.resize(n);
  out.flow_at.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex x = order[i];
    out.parent_at[i] = tree.parent(x) == kNoVertex ? kNoVertex : position[tree.parent(x)];
    out.weight_at[i] = out.weight[x];
    out.potential_at[i] = out.potential[x];
    out.flow_at[i] = out.parent_flow[x];
  }
  out.flow_min = 0;
  bool first = true;
  for (Vertex x = 0; x < n; ++x) {
    if (x == tree.root()) continue;
    if (first || out.parent_flow[x] < out.flow_min) out.flow_min = out.parent_flow[x];
    first = false;
  }
  return out;
}

/// An exact rational threshold N with a floating-point filter in front of the
/// exact comparison.
class Threshold {
 public:
  explicit Threshold(Rational value)
      : value_(std::move(value)),
        num_(boost::multiprecision::numerator(value_)),
        den_(boost::multiprecision::denominator(value_)),
        approx_(isotree::to_double(value_)) {}

  [[nodiscard]] const Rational& value() const { return value_; }

  /// Sign of x - N * w, for w > 0.
  [[nodiscard]] int compare(Wide x, Wide w) const {
    const double xd = static_cast<double>(x);
    const double yd = approx_ * static_cast<double>(w);
    const double diff = xd - yd;
    const double tol = 1e-9 * (std::fabs(xd) + std::fabs(yd));
    if (diff > tol) return 1;
    if (diff < -tol) return -1;
    const BigInt lhs = to_big(x) * den_;
    const BigInt rhs = num_ * to_big(w);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }

 private:
  Rational value_;
  BigInt num_;
  BigInt den_;
  double approx_;
};

struct DecisionWorkspace {
  std::vector<Wide> potential;
  std::vector<Wide> weight;
  std::vector<Vertex> head;
  std::vector<Vertex> tail;
  std::vector<Vertex> next;
};

}  // namespace detail

struct DecisionResult {
  std::optional<Subpartition> subpartition;
  /// Vertices processed by the leaves-to-root pass.
  std::size_t visited = 0;

  explicit operator bool() const { return subpartition.has_value(); }
};

namespace detail {

inline void check_part_count(const WeightedTree& tree, std::size_t k) {
  if (k < 2 || k > tree.size()) {
    throw std::out_of_range("part count k=" + std::to_string(k) + " must lie in [2, " + std::to_string(tree.size()) + "]");
  }
}

/// One leaves-to-root pass. Each vertex x carries the set grown below it, with
/// accumulated potential P (its own boundary except the parent edge, plus
/// alpha-scaled potentials) and weight W. With f the parent-edge flow (0 at
/// the root): cut the set off as a part when P + f <= N W, else merge it into
/// the parent when P - f < N W, else discard it. Stops at the k-th part.
inline DecisionResult decide(const WeightedTree& tree, const ScaledTree& scaled, std::size_t k, const Threshold& bound,
                             DecisionWorkspace& ws) {
  // Everything below is indexed by processing position, not vertex id.
  const std::size_t n = tree.size();
  ws.potential = scaled.potential_at;
  ws.weight = scaled.weight_at;
  ws.head.resize(n);
  ws.tail.resize(n);
  std::iota(ws.head.begin(), ws.head.end(), Vertex{0});
  std::iota(ws.tail.begin(), ws.tail.end(), Vertex{0});
  ws.next.assign(n, kNoVertex);

  DecisionResult result;
  Subpartition sub{n, {}};
  for (std::size_t x = 0; x < n; ++x) {
    ++result.visited;
    const std::size_t u = scaled.parent_at[x];
    const Wide f = u == kNoVertex ? Wide{0} : scaled.flow_at[x];
    if (bound.compare(ws.potential[x] + f, ws.weight[x]) <= 0) {
      auto& part = sub.parts.emplace_back();
      for (Vertex y = ws.head[x]; y != kNoVertex; y = ws.next[y]) part.push_back(scaled.vertex_at[y]);
      if (u != kNoVertex) ws.potential[u] += f;
      if (sub.parts.size() == k) break;
    } else if (u == kNoVertex) {
      break;
    } else if (bound.compare(ws.potential[x] - f, ws.weight[x]) < 0) {
      ws.potential[u] += ws.potential[x];
      ws.weight[u] += ws.weight[x];
      ws.next[ws.tail[u]] = ws.head[x];
      ws.tail[u] = ws.tail[x];
    } else {
      ws.potential[u] += f;
    }
  }
  if (sub.parts.size() == k) {
    sub.normalize();
    result.subpartition = std::move(sub);
  }
  return result;
}

}  // namespace detail

/// Decides whether some k-subpartition has cost_{k,alpha} <= N. A YES carries
/// a certificate whose parts each induce a connected subtree.
inline DecisionResult decide_iso(const WeightedTree& tree, std::size_t k, const Rational& bound,
                                 const Rational& alpha = Rational{1}) {
  detail::check_part_count(tree, k);
  if (bound < 0) throw std::invalid_argument("bound N must be nonnegative");
  const auto scaled = detail::scale_tree(tree, alpha);
  detail::DecisionWorkspace ws;
  return detail::decide(tree, scaled, k, detail::Threshold{bound}, ws);
}

/// Bisection bracket for the optimum: every normalized flow of a proper
/// nonempty subset lies in [lower, upper], and `iterations` halvings shrink the
/// bracket below 1/(2 omega*^2), half the gap between distinct flow values.
struct SearchBounds {
  Rational lower;
  Rational upper;
  unsigned iterations = 1;
};

namespace detail {

/// Smallest t >= 1 with 2^t >= x.
inline unsigned ceil_log2(const Rational& x) {
  if (x <= 2) return 1;
  const BigInt& num = boost::multiprecision::numerator(x);
  const BigInt& den = boost::multiprecision::denominator(x);
  const BigInt ceiling = (num + den - 1) / den;
  return static_cast<unsigned>(boost::multiprecision::msb(BigInt{ceiling - 1})) + 1;
}

inline SearchBounds search_bounds(const ScaledTree& s) {
  SearchBounds b;
  const Rational omega_total{to_big(s.weight_total)};
  b.lower = Rational{to_big(s.flow_min + s.potential_min)} / omega_total;
  b.upper = Rational{to_big(s.flow_total + s.potential_total)} / Rational{to_big(s.weight_min)};
  b.iterations = ceil_log2(2 * omega_total * omega_total * (b.upper - b.lower));
  return b;
}

}  // namespace detail

inline SearchBounds search_bounds(const WeightedTree& tree, const Rational& alpha = Rational{1}) {
  if (tree.size() < 2) throw std::invalid_argument("search bounds need a tree with at least one edge");
  return detail::search_bounds(detail::scale_tree(tree, alpha));
}

struct MisoSolution {
  Rational value;
  Subpartition minimizer;
  SearchBounds bounds;
  std::size_t decisions = 0;
};

/// Exact MISO_{k,alpha} by bisection over decision passes; the minimizer is
/// the certificate of the last YES.
inline MisoSolution solve_miso(const WeightedTree& tree, std::size_t k, const Rational& alpha = Rational{1}) {
  detail::check_part_count(tree, k);
  const auto scaled = detail::scale_tree(tree, alpha);
  MisoSolution out;
  out.bounds = detail::search_bounds(scaled);
  Rational lo = out.bounds.lower;
  Rational hi = out.bounds.upper;
  detail::DecisionWorkspace ws;
  std::optional<Subpartition> last_yes;
  for (unsigned i = 0; i < out.bounds.iterations; ++i) {
    Rational mid = (lo + hi) / 2;
    auto r = detail::decide(tree, scaled, k, detail::Threshold{mid}, ws);
    ++out.decisions;
    if (r) {
      hi = std::move(mid);
      last_yes = std::move(r.subpartition);
    } else {
      lo = std::move(mid);
    }
  }
  if (!last_yes) {
    auto r = detail::decide(tree, scaled, k, detail::Threshold{hi}, ws);
    ++out.decisions;
    if (!r) throw std::logic_error("decision pass rejected the upper search bound");
    last_yes = std::move(r.subpartition);
  }
  out.value = subpartition_cost(tree, *last_yes, alpha);
  if (out.value < lo || out.value > hi) throw std::logic_error("minimizer cost escaped the final bracket");
  out.minimizer = std::move(*last_yes);
  return out;
}

/// Indicator function of each part, as exact vertex functions.
inline std::vector<std::vector<Rational>> indicator_functions(const Subpartition& sub) {
  std::vector<std::vector<Rational>> fs(sub.parts.size(), std::vector<Rational>(sub.vertex_count, Rational{0}));
  for (std::size_t i = 0; i < sub.parts.size(); ++i) {
    for (Vertex x : sub.parts[i]) fs[i][x] = 1;
  }
  return fs;
}

/// max_i (sum_{xy} phi |f_i(x) - f_i(y)| + sum_x alpha p(x) |f_i(x)|) / sum_x omega(x) |f_i(x)|
/// over nonnegative, pairwise omega-orthogonal, nonzero functions.
inline Rational ff_functional(const WeightedTree& tree, const std::vector<std::vector<Rational>>& functions,
                              const Rational& alpha = Rational{1}) {
  const std::size_t n = tree.size();
  if (functions.empty()) throw std::invalid_argument("no functions given");
  for (std::size_t i = 0; i < functions.size(); ++i) {
    const auto& f = functions[i];
    if (f.size() != n) throw std::invalid_argument("function " + std::to_string(i) + " has the wrong length");
    bool nonzero = false;
    for (const auto& v : f) {
      if (v < 0) throw std::invalid_argument("function " + std::to_string(i) + " takes a negative value");
      nonzero = nonzero || v != 0;
    }
    if (!nonzero) throw std::invalid_argument("function " + std::to_string(i) + " is identically zero");
  }
  for (std::size_t i = 0; i < functions.size(); ++i) {
    for (std::size_t j = i + 1; j < functions.size(); ++j) {
      Rational inner = 0;
      for (Vertex x = 0; x < n; ++x) inner += functions[i][x] * functions[j][x] * tree.weight(x).raw();
      if (inner != 0) {
        throw std::invalid_argument("functions " + std::to_string(i) + " and " + std::to_string(j) + " are not orthogonal");
      }
    }
  }
  std::optional<Rational> best;
  for (const auto& f : functions) {
    Rational num = 0;
    Rational den = 0;
    for (const auto& e : tree.edges()) num += Rational{e.flow.raw()} * abs(Rational{f[e.u] - f[e.v]});
    for (Vertex x = 0; x < n; ++x) {
      num += alpha * tree.potential(x).raw() * f[x];
      den += f[x] * tree.weight(x).raw();
    }
    Rational value = num / den;
    if (!best || value > *best) best = std::move(value);
  }
  return *best;
}

}  // namespace isotree
