#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "data.hpp"
#include "distances.hpp"
#include "error.hpp"

namespace tsbench {

enum class Method { paa, apca, dft, dct, dwt, sax, cheb, ipla };

inline constexpr std::array kAllMethods = {Method::paa, Method::apca, Method::dft,  Method::dct,
                                           Method::dwt, Method::sax,  Method::cheb, Method::ipla};

[[nodiscard]] constexpr std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::paa: return "PAA";
    case Method::apca: return "APCA";
    case Method::dft: return "DFT";
    case Method::dct: return "DCT";
    case Method::dwt: return "DWT";
    case Method::sax: return "SAX";
    case Method::cheb: return "CHEB";
    case Method::ipla: return "IPLA";
  }
  return "?";
}

[[nodiscard]] inline Method parse_method(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto m : kAllMethods) {
    if (method_name(m) == upper) return m;
  }
  throw ConfigError("unknown representation '" + std::string(name) +
                    "' (valid: PAA, APCA, DFT, DCT, DWT, SAX, CHEB, IPLA)");
}

/// SAX alphabet size; one byte per symbol.
inline constexpr std::size_t kSaxCardinality = 256;

/// `coeff_count` is the budget in 4-byte numbers. SAX spends it as
/// 4 * coeff_count one-byte symbols; APCA and IPLA spend two numbers per
/// segment.
struct ReductionConfig {
  Method method{Method::paa};
  std::size_t coeff_count{4};
  std::size_t source_length{0};

  friend bool operator==(const ReductionConfig&, const ReductionConfig&) = default;

  [[nodiscard]] std::size_t sax_word_length() const noexcept { return 4 * coeff_count; }
  [[nodiscard]] std::size_t segment_count() const noexcept { return coeff_count / 2; }
};

inline void validate(const ReductionConfig& cfg) {
  const auto name = std::string(method_name(cfg.method));
  const auto n = cfg.source_length;
  const auto k = cfg.coeff_count;
  if (n < 1) throw ConfigError(name + ": source length must be positive");
  if (k < 1) throw ConfigError(name + ": coefficient count must be positive");
  if (k > n) throw ConfigError(name + ": coefficient count exceeds series length");
  switch (cfg.method) {
    case Method::apca:
      if (k % 2 != 0) throw ConfigError("APCA needs an even coefficient count");
      break;
    case Method::ipla:
      if (k % 2 != 0) throw ConfigError("IPLA needs an even coefficient count");
      if (k / 2 > n / 2) throw ConfigError("IPLA needs at least two points per segment");
      break;
    case Method::sax:
      if (4 * k > n) throw ConfigError("SAX word length 4*k exceeds series length");
      break;
    default: break;
  }
}

/// A compressed series. Numeric methods fill `coeffs`; SAX fills `symbols`;
/// APCA also records each segment's right endpoint (inclusive, last = n-1)
/// and IPLA stores (slope, intercept-at-segment-centre) pairs in `coeffs`.
struct ReducedVector {
  Method method{Method::paa};
  std::size_t source_length{0};
  std::vector<double> coeffs;
  std::vector<std::uint8_t> symbols;
  std::vector<std::size_t> endpoints;

  friend bool operator==(const ReducedVector&, const ReducedVector&) = default;
};

// ---------------------------------------------------------------------------
// Standard normal quantiles for SAX

/// Inverse of the standard normal CDF. Acklam's rational approximation
/// polished with Halley steps on erfc; absolute error well below 1e-12.
[[nodiscard]] inline double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  for (int it = 0; it < 3; ++it) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

/// Breakpoints beta_1..beta_255 (index 0 unused, kept so indices match cell
/// numbers): cell s covers [beta_s, beta_{s+1}).
[[nodiscard]] inline const std::array<double, kSaxCardinality>& sax_breakpoints() {
  static const std::array<double, kSaxCardinality> table = [] {
    std::array<double, kSaxCardinality> t{};
    t[0] = -kInf;
    for (std::size_t i = 1; i < kSaxCardinality; ++i) {
      t[i] = i * 2 == kSaxCardinality ? 0.0
                                      : normal_quantile(static_cast<double>(i) / static_cast<double>(kSaxCardinality));
    }
    return t;
  }();
  return table;
}

[[nodiscard]] inline std::uint8_t sax_symbol(double value) {
  const auto& bp = sax_breakpoints();
  const auto it = std::upper_bound(bp.begin() + 1, bp.end(), value);
  return static_cast<std::uint8_t>(std::distance(bp.begin() + 1, it));
}

/// MINDIST cell distance: zero for equal or adjacent symbols.
[[nodiscard]] inline double sax_cell_distance(std::uint8_t r, std::uint8_t c) {
  if (r > c) std::swap(r, c);
  if (c - r <= 1) return 0.0;
  const auto& bp = sax_breakpoints();
  return bp[c] - bp[r + 1];
}

// ---------------------------------------------------------------------------
// Building blocks

/// Segment means of the step function x(t) = x_floor(t) on [0, n), cut into
/// `w` segments of equal real width n / w. Boundary points contribute in
/// proportion to their overlap.
[[nodiscard]] inline std::vector<double> paa_means(Series x, std::size_t w) {
  const std::size_t n = x.size();
  std::vector<double> out(w, 0.0);
  if (n % w == 0) {
    const std::size_t len = n / w;
    for (std::size_t s = 0; s < w; ++s) {
      double acc = 0.0;
      for (std::size_t i = s * len; i < (s + 1) * len; ++i) acc += x[i];
      out[s] = acc / static_cast<double>(len);
    }
    return out;
  }
  // Work in units of 1/w so every boundary is an integer: point i spans
  // [i*w, (i+1)*w), segment s spans [s*n, (s+1)*n).
  for (std::size_t s = 0; s < w; ++s) {
    const std::size_t lo = s * n, hi = (s + 1) * n;
    double acc = 0.0;
    for (std::size_t i = lo / w; i < n && i * w < hi; ++i) {
      const std::size_t a = std::max(lo, i * w), b = std::min(hi, (i + 1) * w);
      if (b > a) acc += x[i] * static_cast<double>(b - a);
    }
    out[s] = acc / static_cast<double>(n);
  }
  return out;
}

/// Orthonormal Haar transform after zero-padding to a power of two, ordered
/// coarse to fine: [average, level-0 detail, 2 level-1 details, ...].
[[nodiscard]] inline std::vector<double> haar_transform(Series x) {
  std::size_t size = 1;
  while (size < x.size()) size *= 2;
  std::vector<double> work(size, 0.0);
  std::copy(x.begin(), x.end(), work.begin());
  std::vector<double> out(size, 0.0);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  std::vector<double> next;
  for (std::size_t len = size; len > 1; len /= 2) {
    next.assign(len / 2, 0.0);
    for (std::size_t i = 0; i < len / 2; ++i) {
      next[i] = (work[2 * i] + work[2 * i + 1]) * inv_sqrt2;
      out[len / 2 + i] = (work[2 * i] - work[2 * i + 1]) * inv_sqrt2;
    }
    std::copy(next.begin(), next.end(), work.begin());
  }
  out[0] = work[0];
  return out;
}

namespace detail {

/// Dense k x n projection matrix stored row-major.
struct Projection {
  std::size_t rows{0}, cols{0};
  std::vector<double> m;

  [[nodiscard]] std::vector<double> apply(Series x) const {
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      const double* row = m.data() + r * cols;
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
      out[r] = acc;
    }
    return out;
  }
};

/// Real orthonormal DFT basis exploiting conjugate symmetry. Rows are
/// Re X_0, Re X_1, Im X_1, Re X_2, ..., (Re X_{n/2} for even n); non-DC,
/// non-Nyquist rows carry a sqrt(2) weight for the mirrored coefficient.
inline Projection dft_projection(std::size_t n, std::size_t k) {
  Projection p{k, n, std::vector<double>(k * n, 0.0)};
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  std::size_t row = 0;
  for (std::size_t f = 0; row < k; ++f) {
    const bool self_conjugate = f == 0 || 2 * f == n;
    const double weight = self_conjugate ? inv : std::sqrt(2.0) * inv;
    for (int part = 0; part < (self_conjugate ? 1 : 2) && row < k; ++part, ++row) {
      for (std::size_t t = 0; t < n; ++t) {
        const double angle = 2.0 * M_PI * static_cast<double>((f * t) % n) / static_cast<double>(n);
        p.m[row * n + t] = part == 0 ? weight * std::cos(angle) : -weight * std::sin(angle);
      }
    }
  }
  return p;
}

/// Orthonormal DCT-II, first k rows.
inline Projection dct_projection(std::size_t n, std::size_t k) {
  Projection p{k, n, std::vector<double>(k * n, 0.0)};
  const auto nd = static_cast<double>(n);
  for (std::size_t r = 0; r < k; ++r) {
    const double scale = r == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t t = 0; t < n; ++t) {
      p.m[r * n + t] = scale * std::cos(M_PI * (static_cast<double>(t) + 0.5) * static_cast<double>(r) / nd);
    }
  }
  return p;
}

/// Discrete Chebyshev transform at n Chebyshev-Gauss nodes of the linear
/// interpolant of the samples (sample i sits at -1 + 2i/(n-1)), composed into
/// one k x n matrix B and divided by its largest singular value, so that
/// ||B (x - y)|| <= ||x - y|| holds for every pair.
inline Projection cheb_projection(std::size_t n, std::size_t k) {
  const auto nd = static_cast<double>(n);
  // Interpolation weights: node j reads samples lo_j and lo_j + 1.
  std::vector<std::size_t> lo(n);
  std::vector<double> frac(n);
  std::vector<double> node(n);
  for (std::size_t j = 0; j < n; ++j) {
    node[j] = std::cos(M_PI * (static_cast<double>(j) + 0.5) / nd);
    if (n == 1) {
      lo[j] = 0;
      frac[j] = 0.0;
      continue;
    }
    const double pos = (node[j] + 1.0) * 0.5 * (nd - 1.0);
    auto i = static_cast<std::size_t>(std::floor(pos));
    if (i >= n - 1) i = n - 2;
    lo[j] = i;
    frac[j] = pos - static_cast<double>(i);
  }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < k; ++r) {
    const double scale = r == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t j = 0; j < n; ++j) {
      // T_r(cos theta) = cos(r theta)
      const double basis = scale * std::cos(static_cast<double>(r) * M_PI * (static_cast<double>(j) + 0.5) / nd);
      const auto row = static_cast<Eigen::Index>(r);
      b(row, static_cast<Eigen::Index>(lo[j])) += basis * (1.0 - frac[j]);
      if (n > 1) b(row, static_cast<Eigen::Index>(lo[j] + 1)) += basis * frac[j];
    }
  }
  const Eigen::MatrixXd gram = b * b.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
  const double sigma = std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
  Projection p{k, n, std::vector<double>(k * n, 0.0)};
  const double inv_sigma = sigma > 0.0 ? 1.0 / sigma : 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      p.m[r * n + c] = b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * inv_sigma;
    }
  }
  return p;
}

inline double coefficient_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// Segment bookkeeping for APCA's bottom-up merging.
struct Segment {
  std::size_t begin, end;  // [begin, end)
  double sum;
  double sumsq;
  [[nodiscard]] double length() const { return static_cast<double>(end - begin); }
  [[nodiscard]] double mean() const { return sum / length(); }
};

/// Increase in squared reconstruction error when two adjacent segments are
/// replaced by their joint mean.
inline double merge_cost(const Segment& a, const Segment& b) {
  const double la = a.length(), lb = b.length();
  const double d = a.mean() - b.mean();
  return la * lb / (la + lb) * d * d;
}

/// IPLA segment boundaries: floor(s * n / segments).
inline std::size_t ipla_boundary(std::size_t s, std::size_t n, std::size_t segments) { return s * n / segments; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Reductions

[[nodiscard]] inline ReducedVector reduce_paa(Series series, std::size_t k) {
  validate(ReductionConfig{Method::paa, k, series.size()});
  return {Method::paa, series.size(), paa_means(series, k), {}, {}};
}

/// Adaptive piecewise constant approximation with k/2 segments. Segments
/// start as the runs of equal values (the exact Haar reconstruction, merged
/// into plateaus) and are merged bottom-up, always taking the adjacent pair
/// whose merge raises the squared error least (ties: leftmost). If the series
/// has fewer than k/2 runs, the longest segment is halved until the count is
/// reached. Values are exact means of the covered points.
[[nodiscard]] inline ReducedVector reduce_apca(Series series, std::size_t k) {
  const std::size_t n = series.size();
  validate(ReductionConfig{Method::apca, k, n});
  const std::size_t target = k / 2;

  std::vector<detail::Segment> segs;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && series[j] == series[i]) ++j;
    const double v = series[i];
    const double len = static_cast<double>(j - i);
    segs.push_back({i, j, v * len, v * v * len});
    i = j;
  }

  if (segs.size() > target) {
    // Doubly linked list over segment slots plus an ordered candidate set
    // keyed by (cost, left slot): the set's first element is always the
    // cheapest merge, leftmost on ties.
    const std::size_t count = segs.size();
    std::vector<std::size_t> prev(count), next(count);
    std::vector<double> cost(count, kInf);
    std::vector<bool> alive(count, true);
    for (std::size_t i = 0; i < count; ++i) {
      prev[i] = i == 0 ? count : i - 1;
      next[i] = i + 1;
    }
    std::set<std::pair<double, std::size_t>> queue;
    auto refresh = [&](std::size_t left) {
      if (left >= count || !alive[left]) return;
      if (cost[left] != kInf) queue.erase({cost[left], left});
      cost[left] = kInf;
      if (next[left] < count) {
        cost[left] = detail::merge_cost(segs[left], segs[next[left]]);
        queue.insert({cost[left], left});
      }
    };
    for (std::size_t i = 0; i + 1 < count; ++i) refresh(i);
    std::size_t remaining = count;
    while (remaining > target) {
      const auto [c, left] = *queue.begin();
      queue.erase(queue.begin());
      cost[left] = kInf;
      const std::size_t right = next[left];
      if (cost[right] != kInf) queue.erase({cost[right], right});
      cost[right] = kInf;
      segs[left].end = segs[right].end;
      segs[left].sum += segs[right].sum;
      segs[left].sumsq += segs[right].sumsq;
      alive[right] = false;
      next[left] = next[right];
      if (next[left] < count) prev[next[left]] = left;
      --remaining;
      refresh(left);
      if (prev[left] < count) refresh(prev[left]);
    }
    std::vector<detail::Segment> merged;
    for (std::size_t i = 0; i < count; i = next[i]) merged.push_back(segs[i]);
    segs = std::move(merged);
  }

  while (segs.size() < target) {
    std::size_t longest = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].end - segs[i].begin > segs[longest].end - segs[longest].begin) longest = i;
    }
    const auto s = segs[longest];
    const std::size_t mid = s.begin + (s.end - s.begin) / 2;
    auto make = [&](std::size_t b, std::size_t e) {
      detail::Segment out{b, e, 0.0, 0.0};
      for (std::size_t i = b; i < e; ++i) {
        out.sum += series[i];
        out.sumsq += series[i] * series[i];
      }
      return out;
    };
    segs[longest] = make(s.begin, mid);
    segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(longest) + 1, make(mid, s.end));
  }

  ReducedVector out{Method::apca, n, {}, {}, {}};
  for (const auto& s : segs) {
    // Exact mean recomputed from the raw points: running sums drift.
    double acc = 0.0;
    for (std::size_t i = s.begin; i < s.end; ++i) acc += series[i];
    out.coeffs.push_back(acc / s.length());
    out.endpoints.push_back(s.end - 1);
  }
  return out;
}

/// SAX word of length 4 * k_budget over the 256-symbol alphabet.
[[nodiscard]] inline ReducedVector reduce_sax(Series series, std::size_t k_budget) {
  const ReductionConfig cfg{Method::sax, k_budget, series.size()};
  validate(cfg);
  const auto means = paa_means(series, cfg.sax_word_length());
  ReducedVector out{Method::sax, series.size(), {}, {}, {}};
  out.symbols.reserve(means.size());
  for (double m : means) out.symbols.push_back(sax_symbol(m));
  return out;
}

/// Least-squares line per equal-length segment, stored as (slope, value at
/// the segment's centre) pairs.
[[nodiscard]] inline ReducedVector reduce_ipla(Series series, std::size_t k) {
  const std::size_t n = series.size();
  validate(ReductionConfig{Method::ipla, k, n});
  const std::size_t segments = k / 2;
  ReducedVector out{Method::ipla, n, {}, {}, {}};
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t b = detail::ipla_boundary(s, n, segments);
    const std::size_t e = detail::ipla_boundary(s + 1, n, segments);
    const double centre = 0.5 * static_cast<double>(b + e - 1);
    double sy = 0.0, sty = 0.0, stt = 0.0;
    for (std::size_t i = b; i < e; ++i) {
      const double t = static_cast<double>(i) - centre;
      sy += series[i];
      sty += t * series[i];
      stt += t * t;
    }
    const double slope = stt > 0.0 ? sty / stt : 0.0;
    out.coeffs.push_back(slope);
    out.coeffs.push_back(sy / static_cast<double>(e - b));
  }
  return out;
}

/// Precomputes the per-(method, n, k) tables and exposes reduction and the
/// reduced-space lower bound. Immutable after construction, so one instance
/// can be shared across threads.
class Representation {
 public:
  explicit Representation(ReductionConfig cfg) : cfg_(cfg) {
    validate(cfg_);
    switch (cfg_.method) {
      case Method::dft: projection_ = detail::dft_projection(cfg_.source_length, cfg_.coeff_count); break;
      case Method::dct: projection_ = detail::dct_projection(cfg_.source_length, cfg_.coeff_count); break;
      case Method::cheb: projection_ = detail::cheb_projection(cfg_.source_length, cfg_.coeff_count); break;
      default: break;
    }
  }

  [[nodiscard]] const ReductionConfig& config() const noexcept { return cfg_; }

  [[nodiscard]] ReducedVector reduce(Series series) const {
    if (series.size() != cfg_.source_length) {
      throw ShapeError(std::string(method_name(cfg_.method)) + ": expected length " +
                       std::to_string(cfg_.source_length) + ", got " + std::to_string(series.size()));
    }
    switch (cfg_.method) {
      case Method::paa: return reduce_paa(series, cfg_.coeff_count);
      case Method::apca: return reduce_apca(series, cfg_.coeff_count);
      case Method::sax: return reduce_sax(series, cfg_.coeff_count);
      case Method::ipla: return reduce_ipla(series, cfg_.coeff_count);
      case Method::dwt: {
        auto h = haar_transform(series);
        h.resize(cfg_.coeff_count);
        return {Method::dwt, series.size(), std::move(h), {}, {}};
      }
      case Method::dft:
      case Method::dct:
      case Method::cheb: return {cfg_.method, series.size(), projection_.apply(series), {}, {}};
    }
    throw ConfigError("unknown representation");
  }

  /// Lower bound between two reduced vectors. APCA has no reduced-reduced
  /// form here; pass the raw query instead.
  [[nodiscard]] double lower_bound(const ReducedVector& a, const ReducedVector& b) const {
    check(a);
    check(b);
    const auto n = static_cast<double>(cfg_.source_length);
    switch (cfg_.method) {
      case Method::paa: {
        const double w = static_cast<double>(cfg_.coeff_count);
        return std::sqrt(n / w) * detail::coefficient_distance(a.coeffs, b.coeffs);
      }
      case Method::sax: {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.symbols.size(); ++i) {
          const double d = sax_cell_distance(a.symbols[i], b.symbols[i]);
          acc += d * d;
        }
        return std::sqrt(n / static_cast<double>(cfg_.sax_word_length())) * std::sqrt(acc);
      }
      case Method::ipla: {
        const std::size_t segments = cfg_.segment_count();
        double acc = 0.0;
        for (std::size_t s = 0; s < segments; ++s) {
          const std::size_t lo = detail::ipla_boundary(s, cfg_.source_length, segments);
          const std::size_t hi = detail::ipla_boundary(s + 1, cfg_.source_length, segments);
          const double len = static_cast<double>(hi - lo);
          // sum over centred t of (ds * t + dc)^2 = len * dc^2 + ds^2 * sum t^2,
          // with sum t^2 = len (len^2 - 1) / 12 for unit-spaced centred points.
          const double ds = a.coeffs[2 * s] - b.coeffs[2 * s];
          const double dc = a.coeffs[2 * s + 1] - b.coeffs[2 * s + 1];
          acc += len * dc * dc + ds * ds * len * (len * len - 1.0) / 12.0;
        }
        return std::sqrt(acc);
      }
      case Method::dft:
      case Method::dct:
      case Method::dwt:
      case Method::cheb: return detail::coefficient_distance(a.coeffs, b.coeffs);
      case Method::apca:
        throw UsageError("APCA lower bound compares a raw query with a reduced candidate");
    }
    throw ConfigError("unknown representation");
  }

  /// Lower bound between a raw query and a reduced candidate. For APCA the
  /// query is projected onto the candidate's segments; other methods reduce
  /// the query first.
  [[nodiscard]] double lower_bound(Series query, const ReducedVector& candidate) const {
    check(candidate);
    if (query.size() != cfg_.source_length) throw ShapeError("lower bound: query length mismatch");
    if (cfg_.method != Method::apca) return lower_bound(reduce(query), candidate);
    double acc = 0.0;
    std::size_t begin = 0;
    for (std::size_t s = 0; s < candidate.endpoints.size(); ++s) {
      const std::size_t end = candidate.endpoints[s] + 1;
      double sum = 0.0;
      for (std::size_t i = begin; i < end; ++i) sum += query[i];
      const double len = static_cast<double>(end - begin);
      const double d = sum / len - candidate.coeffs[s];
      acc += len * d * d;
      begin = end;
    }
    return std::sqrt(acc);
  }

 private:
  void check(const ReducedVector& v) const {
    if (v.method != cfg_.method) {
      throw UsageError(std::string("lower bound: method mismatch (") + std::string(method_name(v.method)) +
                       " vs " + std::string(method_name(cfg_.method)) + ")");
    }
    if (v.source_length != cfg_.source_length) throw UsageError("lower bound: source length mismatch");
  }

  ReductionConfig cfg_;
  detail::Projection projection_;
};

[[nodiscard]] inline ReducedVector reduce_dft(Series series, std::size_t k) {
  return Representation({Method::dft, k, series.size()}).reduce(series);
}
[[nodiscard]] inline ReducedVector reduce_dct(Series series, std::size_t k) {
  return Representation({Method::dct, k, series.size()}).reduce(series);
}
[[nodiscard]] inline ReducedVector reduce_dwt(Series series, std::size_t k) {
  return Representation({Method::dwt, k, series.size()}).reduce(series);
}
[[nodiscard]] inline ReducedVector reduce_cheb(Series series, std::size_t k) {
  return Representation({Method::cheb, k, series.size()}).reduce(series);
}

[[nodiscard]] inline ReducedVector reduce(Series series, const ReductionConfig& cfg) {
  return Representation(cfg).reduce(series);
}

[[nodiscard]] inline double lb_distance(const ReducedVector& a, const ReducedVector& b, const ReductionConfig& cfg) {
  return Representation(cfg).lower_bound(a, b);
}

[[nodiscard]] inline double lb_distance(Series a, const ReducedVector& b, const ReductionConfig& cfg) {
  return Representation(cfg).lower_bound(a, b);
}

/// Lower bound for a raw pair under the experiment convention: APCA reduces
/// only the candidate `s`, every other method reduces both sides.
[[nodiscard]] inline double pair_lower_bound(const Representation& rep, Series t, Series s) {
  if (rep.config().method == Method::apca) return rep.lower_bound(t, rep.reduce(s));
  return rep.lower_bound(rep.reduce(t), rep.reduce(s));
}

/// Slack for floating-point rounding in the bound-versus-distance checks.
[[nodiscard]] constexpr double lb_tolerance(double ed) noexcept { return 1e-9 * (1.0 + ed); }

struct TlbValue {
  double value;
  bool clamped;  // raw ratio exceeded 1 by less than 1e-9
};

/// lower_bound(t, s) / ED(t, s). Ratios in (1, 1 + 1e-9] are clamped to 1;
/// anything larger means the bound is unsound and raises.
[[nodiscard]] inline TlbValue tlb_value(const Representation& rep, Series t, Series s) {
  const double ed = euclidean(t, s);
  if (ed == 0.0) throw DomainError("TLB undefined: series are identical");
  const double lb = pair_lower_bound(rep, t, s);
  const double ratio = lb / ed;
  if (ratio > 1.0) {
    if (ratio - 1.0 <= 1e-9) return {1.0, true};
    throw Error(std::string(method_name(rep.config().method)) + " lower bound exceeds true distance (ratio " +
                format_real(ratio) + ")");
  }
  return {ratio, false};
}

[[nodiscard]] inline double tlb(Series t, Series s, const ReductionConfig& cfg) {
  return tlb_value(Representation(cfg), t, s).value;
}

}  // namespace tsbench
