#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace tsbench {

using Series = std::span<const double>;

/// Warping window half-width in points; std::nullopt means unconstrained.
using Window = std::optional<std::size_t>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void require_equal_lengths(Series a, Series b, std::string_view what) {
  if (a.size() != b.size()) {
    throw ShapeError(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
}

inline void require_non_empty(Series a, Series b, std::string_view what) {
  if (a.empty() || b.empty()) throw DomainError(std::string(what) + ": empty series");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lock-step measures

enum class Norm { l1, l2, linf };

[[nodiscard]] inline double squared_euclidean(Series a, Series b) {
  detail::require_equal_lengths(a, b, "euclidean");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

[[nodiscard]] inline double euclidean(Series a, Series b) { return std::sqrt(squared_euclidean(a, b)); }

[[nodiscard]] inline double lp_norm(Series a, Series b, Norm p) {
  detail::require_equal_lengths(a, b, "lp_norm");
  switch (p) {
    case Norm::l1: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
      return acc;
    }
    case Norm::l2: return euclidean(a, b);
    case Norm::linf: {
      double m = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
      return m;
    }
  }
  return 0.0;
}

/// Integral over [0, n-1] of |a(t) - b(t)| for the piecewise-linear
/// interpolants of both series. Intervals without a sign change reduce to the
/// trapezoid (d_i + d_{i+1}) / 2; intervals crossing zero are integrated
/// exactly as two triangles.
[[nodiscard]] inline double dissim(Series a, Series b) {
  detail::require_equal_lengths(a, b, "dissim");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double d0 = a[i] - b[i];
    const double d1 = a[i + 1] - b[i + 1];
    if ((d0 >= 0.0 && d1 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0)) {
      acc += 0.5 * (std::abs(d0) + std::abs(d1));
    } else {
      acc += 0.5 * (d0 * d0 + d1 * d1) / (std::abs(d0) + std::abs(d1));
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Dynamic time warping

namespace detail {

/// Column range [lo, hi] (1-based) of row i in the length-scaled band
/// |i*m - j*n| <= T. For unequal lengths T is at least max(n, m), which
/// guarantees a connected warping path even when the window is zero.
struct Band {
  std::size_t n, m;
  bool full;
  std::int64_t threshold;

  Band(std::size_t n_, std::size_t m_, Window window) : n(n_), m(m_), full(!window.has_value()), threshold(0) {
    if (!full) {
      threshold = static_cast<std::int64_t>(*window) * static_cast<std::int64_t>(m);
      if (n != m) threshold = std::max<std::int64_t>(threshold, static_cast<std::int64_t>(std::max(n, m)));
    }
  }

  [[nodiscard]] std::pair<std::size_t, std::size_t> row(std::size_t i) const {
    if (full) return {1, m};
    const auto im = static_cast<std::int64_t>(i * m);
    const auto nn = static_cast<std::int64_t>(n);
    // lo = ceil((im - T) / n), hi = floor((im + T) / n)
    const std::int64_t num_lo = im - threshold;
    std::int64_t lo = num_lo <= 0 ? -((-num_lo) / nn) : (num_lo + nn - 1) / nn;
    std::int64_t hi = (im + threshold) / nn;
    lo = std::max<std::int64_t>(lo, 1);
    hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(m));
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  }
};

}  // namespace detail

/// Squared-cost DTW accumulated over the band, without the final square
/// root. With a finite `cutoff` the computation early-abandons: a cell whose
/// best case exceeds the cutoff is dead, each row is only evaluated between
/// the live cells the previous row can reach, and +inf is returned once a
/// row has no live cell. The best case of a cell in 0-based row i is its
/// value plus, when `remaining` is given, remaining[i]: a lower bound on the
/// cost still to be paid by the rows after it. Results at or below the
/// cutoff are exact; the default cutoff never abandons.
[[nodiscard]] inline double dtw_squared(Series a, Series b, Window window, double cutoff = kInf,
                                        std::span<const double> remaining = {}) {
  detail::require_non_empty(a, b, "dtw");
  if (!remaining.empty() && remaining.size() != a.size()) throw ShapeError("dtw: remaining-cost size mismatch");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  const detail::Band band(n, m, window);
  std::vector<double> prev(m + 1, kInf);
  std::vector<double> curr(m + 1, kInf);
  prev[0] = 0.0;
  // Live (not pruned) cells of the previous row lie in [live_lo, live_hi].
  std::size_t live_lo = 0, live_hi = 0;
  std::size_t old_lo = 1, old_hi = 0;  // range written two rows ago, still in `curr`
  std::size_t prev_lo = 1, prev_hi = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = old_lo; j <= old_hi; ++j) curr[j] = kInf;
    curr[0] = kInf;
    const auto [lo, hi] = band.row(i);
    const double ai = a[i - 1];
    const double rest = remaining.empty() ? 0.0 : remaining[i - 1];
    const std::size_t first = std::max(lo, live_lo);
    std::size_t new_lo = 0, new_hi = 0, last = first == 0 ? 0 : first - 1;
    for (std::size_t j = first; j <= hi; ++j) {
      const double d = ai - b[j - 1];
      const double v = d * d + std::min({prev[j - 1], prev[j], curr[j - 1]});
      last = j;
      if (v + rest > cutoff) {
        curr[j] = kInf;
        // Past the previous row's live range only the horizontal move remains.
        if (j > live_hi) break;
        continue;
      }
      curr[j] = v;
      if (new_lo == 0) new_lo = j;
      new_hi = j;
    }
    if (new_lo == 0) return kInf;
    old_lo = prev_lo;
    old_hi = prev_hi;
    prev_lo = first;
    prev_hi = last;
    live_lo = new_lo;
    live_hi = new_hi;
    std::swap(prev, curr);
  }
  return prev[m];
}

/// DTW with squared local cost and final square root; the band is
/// |i - j*n/m| <= window (Sakoe-Chiba, scaled for unequal lengths).
[[nodiscard]] inline double dtw(Series a, Series b, Window window = std::nullopt) {
  return std::sqrt(dtw_squared(a, b, window));
}

// ---------------------------------------------------------------------------
// LB_Keogh

/// Running max/min of a query over [i - window, i + window].
struct Envelope {
  std::vector<double> upper;
  std::vector<double> lower;
};

[[nodiscard]] inline Envelope make_envelope(Series q, std::size_t window) {
  const std::size_t n = q.size();
  Envelope env{std::vector<double>(n), std::vector<double>(n)};
  std::deque<std::size_t> maxq, minq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t right = std::min(n - 1, i + window);
    while (next <= right) {
      while (!maxq.empty() && q[maxq.back()] <= q[next]) maxq.pop_back();
      maxq.push_back(next);
      while (!minq.empty() && q[minq.back()] >= q[next]) minq.pop_back();
      minq.push_back(next);
      ++next;
    }
    const std::size_t left = i >= window ? i - window : 0;
    while (maxq.front() < left) maxq.pop_front();
    while (minq.front() < left) minq.pop_front();
    env.upper[i] = q[maxq.front()];
    env.lower[i] = q[minq.front()];
  }
  return env;
}

/// Squared LB_Keogh of `candidate` against a query envelope; stops summing
/// once the partial sum exceeds `cutoff`.
[[nodiscard]] inline double lb_keogh_squared(const Envelope& env, Series candidate, double cutoff = kInf) {
  if (candidate.size() != env.upper.size()) throw ShapeError("lb_keogh: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < candidate.size() && acc <= cutoff; ++i) {
    const double c = candidate[i];
    if (c > env.upper[i]) {
      const double d = c - env.upper[i];
      acc += d * d;
    } else if (c < env.lower[i]) {
      const double d = env.lower[i] - c;
      acc += d * d;
    }
  }
  return acc;
}

/// Suffix sums of the squared LB_Keogh terms: out[i] is the contribution of
/// candidate points i+1..n-1. Used as the remaining-cost bound of an early
/// abandoning dtw_squared(candidate, query, ...).
[[nodiscard]] inline std::vector<double> lb_keogh_tail(const Envelope& env, Series candidate) {
  if (candidate.size() != env.upper.size()) throw ShapeError("lb_keogh: length mismatch");
  std::vector<double> out(candidate.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = candidate.size(); i-- > 0;) {
    out[i] = acc;
    const double c = candidate[i];
    if (c > env.upper[i]) acc += (c - env.upper[i]) * (c - env.upper[i]);
    else if (c < env.lower[i]) acc += (env.lower[i] - c) * (env.lower[i] - c);
  }
  return out;
}

[[nodiscard]] inline double lb_keogh(Series query, Series candidate, std::size_t window) {
  detail::require_equal_lengths(query, candidate, "lb_keogh");
  return std::sqrt(lb_keogh_squared(make_envelope(query, window), candidate));
}

// ---------------------------------------------------------------------------
// Edit-distance family

/// Length of the longest common subsequence where a_i matches b_j iff
/// |a_i - b_j| < epsilon and |i - j| <= window.
[[nodiscard]] inline std::size_t lcss_length(Series a, Series b, double epsilon, Window window = std::nullopt) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), curr(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = 0;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t gap = i > j ? i - j : j - i;
      const bool in_band = !window || gap <= *window;
      if (in_band && std::abs(a[i - 1] - b[j - 1]) < epsilon) {
        curr[j] = prev[j - 1] + 1;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

/// 1 - LCSS / min(n, m), in [0, 1].
[[nodiscard]] inline double lcss(Series a, Series b, double epsilon, Window window = std::nullopt) {
  detail::require_non_empty(a, b, "lcss");
  const auto len = lcss_length(a, b, epsilon, window);
  return 1.0 - static_cast<double>(len) / static_cast<double>(std::min(a.size(), b.size()));
}

/// Edit distance on real sequences: substitution costs 0 when
/// |a_i - b_j| <= epsilon and 1 otherwise; every gap costs 1.
[[nodiscard]] inline double edr(Series a, Series b, double epsilon) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m + 1), curr(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const double sub = std::abs(a[i - 1] - b[j - 1]) <= epsilon ? 0.0 : 1.0;
      curr[j] = std::min({prev[j - 1] + sub, prev[j] + 1.0, curr[j - 1] + 1.0});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

/// Edit distance with real penalty: matches cost |a_i - b_j|, gaps cost the
/// distance to the reference value g.
[[nodiscard]] inline double erp(Series a, Series b, double g = 0.0) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m + 1), curr(m + 1);
  prev[0] = 0.0;
  for (std::size_t j = 1; j <= m; ++j) prev[j] = prev[j - 1] + std::abs(b[j - 1] - g);
  for (std::size_t i = 1; i <= n; ++i) {
    const double gap_a = std::abs(a[i - 1] - g);
    curr[0] = prev[0] + gap_a;
    for (std::size_t j = 1; j <= m; ++j) {
      curr[j] = std::min({prev[j - 1] + std::abs(a[i - 1] - b[j - 1]), prev[j] + gap_a,
                          curr[j - 1] + std::abs(b[j - 1] - g)});
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

/// Swale similarity score: each matched pair (|a_i - b_j| <= epsilon) earns
/// `reward`, each skipped point costs `penalty`; the best alignment wins.
[[nodiscard]] inline double swale(Series a, Series b, double epsilon, double reward = 50.0, double penalty = 0.0) {
  if (penalty < 0.0 || penalty > reward) throw ConfigError("swale: penalty must lie in [0, reward]");
  const std::size_t n = a.size(), m = b.size();
  std::vector<double> prev(m + 1), curr(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = -penalty * static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = -penalty * static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      double best = std::max(prev[j], curr[j - 1]) - penalty;
      if (std::abs(a[i - 1] - b[j - 1]) <= epsilon) best = std::max(best, prev[j - 1] + reward);
      curr[j] = best;
    }
    std::swap(prev, curr);
  }
  return prev[m];
}

/// reward * min(n, m) - swale score; zero iff a perfect full matching exists.
[[nodiscard]] inline double swale_distance(Series a, Series b, double epsilon, double reward = 50.0,
                                           double penalty = 0.0) {
  const double top = reward * static_cast<double>(std::min(a.size(), b.size()));
  return std::max(0.0, top - swale(a, b, epsilon, reward, penalty));
}

// ---------------------------------------------------------------------------
// TQuEST

struct Interval {
  double start;
  double end;
};

/// Maximal intervals where the series exceeds tau, with crossing times
/// linearly interpolated between samples.
[[nodiscard]] inline std::vector<Interval> threshold_intervals(Series s, double tau) {
  std::vector<Interval> out;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (!(s[i] > tau)) {
      ++i;
      continue;
    }
    double start = 0.0;
    if (i > 0) start = static_cast<double>(i - 1) + (tau - s[i - 1]) / (s[i] - s[i - 1]);
    std::size_t j = i;
    while (j + 1 < n && s[j + 1] > tau) ++j;
    double end = static_cast<double>(n - 1);
    if (j + 1 < n) end = static_cast<double>(j) + (s[j] - tau) / (s[j] - s[j + 1]);
    out.push_back({start, end});
    i = j + 1;
  }
  return out;
}

namespace detail {

inline double mean_nearest(const std::vector<Interval>& from, const std::vector<Interval>& to) {
  double acc = 0.0;
  for (const auto& x : from) {
    double best = kInf;
    for (const auto& y : to) best = std::min(best, std::hypot(x.start - y.start, x.end - y.end));
    acc += best;
  }
  return acc / static_cast<double>(from.size());
}

}  // namespace detail

/// Symmetric averaged nearest-neighbour distance between the two sets of
/// threshold-crossing interval points. Both sets empty gives 0; exactly one
/// empty gives max(n, m).
[[nodiscard]] inline double tquest(Series a, Series b, double tau) {
  const auto ia = threshold_intervals(a, tau);
  const auto ib = threshold_intervals(b, tau);
  if (ia.empty() && ib.empty()) return 0.0;
  if (ia.empty() || ib.empty()) return static_cast<double>(std::max(a.size(), b.size()));
  return detail::mean_nearest(ia, ib) + detail::mean_nearest(ib, ia);
}

// ---------------------------------------------------------------------------
// ANA

/// Maps a DNA string to weights A=0, C=1, G=2, T=3 (case-insensitive).
/// Whitespace is skipped; any other character is a parse error.
[[nodiscard]] inline std::vector<double> dna_weights(std::string_view dna) {
  std::vector<double> out;
  out.reserve(dna.size());
  for (std::size_t i = 0; i < dna.size(); ++i) {
    switch (dna[i]) {
      case 'A': case 'a': out.push_back(0.0); break;
      case 'C': case 'c': out.push_back(1.0); break;
      case 'G': case 'g': out.push_back(2.0); break;
      case 'T': case 't': out.push_back(3.0); break;
      case ' ': case '\n': case '\r': case '\t': break;
      default:
        throw ParseError("invalid DNA character '" + std::string(1, dna[i]) + "' at offset " + std::to_string(i));
    }
  }
  return out;
}

/// Weight window W[offset, offset + n) taken from a DNA string.
[[nodiscard]] inline std::vector<double> dna_weights(std::string_view dna, std::size_t offset, std::size_t n) {
  auto all = dna_weights(dna);
  if (offset + n > all.size()) {
    throw BoundsError("weight window [" + std::to_string(offset) + ", " + std::to_string(offset + n) +
                      ") exceeds " + std::to_string(all.size()) + " weights");
  }
  return {all.begin() + static_cast<std::ptrdiff_t>(offset),
          all.begin() + static_cast<std::ptrdiff_t>(offset + n)};
}

/// Weighted Euclidean distance sqrt(sum (a_i - b_i)^2 * W[offset + i]).
[[nodiscard]] inline double ana(Series a, Series b, std::span<const double> weights, std::size_t offset = 0) {
  detail::require_equal_lengths(a, b, "ana");
  if (offset + a.size() > weights.size()) {
    throw BoundsError("ana: weight window [" + std::to_string(offset) + ", " + std::to_string(offset + a.size()) +
                      ") exceeds " + std::to_string(weights.size()) + " weights");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double w = weights[offset + i];
    if (w < 0.0) throw ConfigError("ana: weights must be non-negative");
    const double d = a[i] - b[i];
    acc += d * d * w;
  }
  return std::sqrt(acc);
}

}  // namespace tsbench
