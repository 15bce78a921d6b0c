#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "isotree/core.hpp"
#include "isotree/postprocess.hpp"
#include "isotree/solver.hpp"

namespace isotree {

/// Post-processed minimizer at one value of alpha.
struct ResidueSample {
  Rational alpha;
  Rational miso;
  Subpartition subpartition;

  [[nodiscard]] std::size_t residue_count() const { return subpartition.residue_number(); }
};

inline ResidueSample residue_at(const WeightedTree& tree, std::size_t k, const Rational& alpha, bool postprocess = true) {
  auto solution = solve_miso(tree, k, alpha);
  ResidueSample out{alpha, solution.value, std::move(solution.minimizer)};
  if (postprocess) out.subpartition = reduce_residue(tree, std::move(out.subpartition), out.miso, alpha);
  return out;
}

/// exp(-low / sigma_s) - exp(-high / sigma_s); an infinite high end gives
/// exp(-low / sigma_s).
inline double interval_measure(double low, double high, double sigma_s) {
  if (!(sigma_s > 0.0)) throw std::invalid_argument("sigma_s must be positive");
  if (high < low) throw std::invalid_argument("interval is reversed");
  if (low == high) return 0.0;
  return std::exp(-low / sigma_s) - std::exp(-high / sigma_s);
}

struct ProfileInterval {
  Rational low;
  Rational high;
  std::size_t residue_count = 0;
  double sm = 0.0;
  /// Residue count dropped relative to the previous interval.
  bool non_monotone = false;
};

/// Residue number as a step function of alpha over [0, alpha_max].
struct OutlierProfile {
  std::size_t k = 0;
  double sigma_s = 0.0;
  Rational epsilon;
  Rational alpha_max;
  std::vector<ProfileInterval> intervals;
  /// Every evaluated alpha, ascending.
  std::vector<ResidueSample> samples;
};

/// Recursive bisection of [0, alpha_max]: a bracket is split while its end
/// residue counts differ and it is wider than epsilon. Breakpoints sit at the
/// midpoint of their final bracket, so they are located to within epsilon / 2.
inline OutlierProfile outlier_profile(const WeightedTree& tree, std::size_t k, const Rational& alpha_max,
                                      const Rational& epsilon, double sigma_s, bool postprocess = true) {
  if (alpha_max <= 0) throw std::invalid_argument("alpha_max must be positive");
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  if (!(sigma_s > 0.0)) throw std::invalid_argument("sigma_s must be positive");

  OutlierProfile profile{k, sigma_s, epsilon, alpha_max, {}, {}};
  auto& samples = profile.samples;
  samples.push_back(residue_at(tree, k, Rational{0}, postprocess));
  samples.push_back(residue_at(tree, k, alpha_max, postprocess));

  std::function<void(const Rational&, std::size_t, const Rational&, std::size_t)> search =
      [&](const Rational& a, std::size_t na, const Rational& b, std::size_t nb) {
        if (na == nb || b - a <= epsilon) return;
        const Rational mid = (a + b) / 2;
        samples.push_back(residue_at(tree, k, mid, postprocess));
        const std::size_t nm = samples.back().residue_count();
        search(a, na, mid, nm);
        search(mid, nm, b, nb);
      };
  const std::size_t n0 = samples[0].residue_count();
  const std::size_t n1 = samples[1].residue_count();
  search(Rational{0}, n0, alpha_max, n1);
  std::sort(samples.begin(), samples.end(), [](const ResidueSample& x, const ResidueSample& y) { return x.alpha < y.alpha; });

  Rational low = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const bool last = i + 1 == samples.size();
    if (!last && samples[i + 1].residue_count() == samples[i].residue_count()) continue;
    const Rational high = last ? alpha_max : Rational{(samples[i].alpha + samples[i + 1].alpha) / 2};
    ProfileInterval interval{low, high, samples[i].residue_count(), 0.0, false};
    interval.sm = interval_measure(to_double(low), to_double(high), sigma_s);
    interval.non_monotone = !profile.intervals.empty() && interval.residue_count < profile.intervals.back().residue_count;
    profile.intervals.push_back(std::move(interval));
    low = high;
  }
  return profile;
}

struct AlphaStar {
  std::size_t interval = 0;
  Rational alpha;
};

/// Interval of largest sm (earliest on ties); alpha* is its lower end.
inline AlphaStar select_alpha_star(const OutlierProfile& profile) {
  if (profile.intervals.empty()) throw std::invalid_argument("empty profile");
  std::size_t best = 0;
  for (std::size_t i = 1; i < profile.intervals.size(); ++i) {
    if (profile.intervals[i].sm > profile.intervals[best].sm) best = i;
  }
  return {best, profile.intervals[best].low};
}

namespace detail {

inline std::vector<Vertex> intersect_residues(std::size_t n, const std::vector<const Subpartition*>& subs) {
  std::vector<char> keep(n, 1);
  for (const auto* s : subs) {
    for (const auto& part : s->parts) {
      for (Vertex x : part) keep[x] = 0;
    }
  }
  std::vector<Vertex> out;
  for (Vertex x = 0; x < n; ++x) {
    if (keep[x]) out.push_back(x);
  }
  return out;
}

}  // namespace detail

/// Vertices that are residue at every grid value beta >= alpha. When no grid
/// value reaches alpha, the residue at alpha itself is used.
inline std::vector<Vertex> outlier_set(const WeightedTree& tree, std::size_t k, const Rational& alpha,
                                       const std::vector<Rational>& grid, bool postprocess = true) {
  if (alpha < 0) throw std::invalid_argument("alpha must be nonnegative");
  std::vector<ResidueSample> samples;
  for (const auto& beta : grid) {
    if (beta >= alpha) samples.push_back(residue_at(tree, k, beta, postprocess));
  }
  if (samples.empty()) samples.push_back(residue_at(tree, k, alpha, postprocess));
  std::vector<const Subpartition*> subs;
  for (const auto& s : samples) subs.push_back(&s.subpartition);
  return detail::intersect_residues(tree.size(), subs);
}

/// Same approximation over the samples a profile already evaluated.
inline std::vector<Vertex> outlier_set(const OutlierProfile& profile, const Rational& alpha) {
  if (profile.samples.empty()) throw std::invalid_argument("empty profile");
  std::vector<const Subpartition*> subs;
  for (const auto& s : profile.samples) {
    if (s.alpha >= alpha) subs.push_back(&s.subpartition);
  }
  if (subs.empty()) subs.push_back(&profile.samples.back().subpartition);
  return detail::intersect_residues(profile.samples.front().subpartition.vertex_count, subs);
}

inline std::vector<Rational> sample_grid(const OutlierProfile& profile) {
  std::vector<Rational> grid;
  for (const auto& s : profile.samples) grid.push_back(s.alpha);
  return grid;
}

/// Doubles alpha from `start` until the residue count holds steady over two
/// doublings (or every non-part vertex is residue); returns the last alpha.
inline Rational choose_alpha_max(const WeightedTree& tree, std::size_t k, bool postprocess = true,
                                 const Rational& start = Rational{1}, unsigned max_doublings = 40) {
  if (start <= 0) throw std::invalid_argument("start must be positive");
  Rational alpha = start;
  std::size_t previous = residue_at(tree, k, alpha, postprocess).residue_count();
  unsigned stable = 0;
  for (unsigned i = 0; i < max_doublings && stable < 2 && previous + k < tree.size(); ++i) {
    alpha *= 2;
    const std::size_t r = residue_at(tree, k, alpha, postprocess).residue_count();
    stable = r == previous ? stable + 1 : 0;
    previous = r;
  }
  return alpha;
}

}  // namespace isotree
