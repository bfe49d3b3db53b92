#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "data.hpp"
#include "distances.hpp"
#include "error.hpp"
#include "util.hpp"

namespace tsbench {

enum class BoundKind { none, keogh, magic };

/// Lower bound used by the scan. `magic` is LB_Keogh + fraction * (DTW -
/// LB_Keogh), an idealized bound charged only the cost of LB_Keogh.
struct Bound {
  BoundKind kind{BoundKind::keogh};
  double fraction{0.0};

  static constexpr Bound none() { return {BoundKind::none, 0.0}; }
  static constexpr Bound keogh() { return {BoundKind::keogh, 0.0}; }
  static Bound magic(double f) {
    if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("magic bound fraction must lie in [0, 1]");
    return {BoundKind::magic, f};
  }

  friend bool operator==(const Bound&, const Bound&) = default;
};

/// `none`, `keogh`, `magic0.50`, `magic1.00`.
[[nodiscard]] inline std::string bound_name(const Bound& b) {
  switch (b.kind) {
    case BoundKind::none: return "none";
    case BoundKind::keogh: return "keogh";
    case BoundKind::magic: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "magic%.2f", b.fraction);
      return buf;
    }
  }
  return "?";
}

[[nodiscard]] inline Bound parse_bound(std::string_view text) {
  if (text == "none") return Bound::none();
  if (text == "keogh") return Bound::keogh();
  if (text.starts_with("magic")) {
    double f = 0.0;
    if (parse_real(text.substr(5), f)) return Bound::magic(f);
  }
  throw ConfigError("unknown bound '" + std::string(text) + "' (valid: none, keogh, magic<f> with f in [0,1])");
}

enum class Ordering { natural, sorted_by_lb };

struct ScanConfig {
  std::size_t window{0};
  Bound bound{Bound::keogh()};
  Ordering ordering{Ordering::natural};
  bool early_abandon{false};
};

struct ScanReport {
  std::size_t nn_index{0};
  double nn_distance{kInf};
  std::size_t full_dtw_count{0};
  std::size_t pruned_count{0};
  double pruning_fraction{0.0};
  std::size_t lb_evaluations{0};
  double wall_ms{0.0};
};

[[nodiscard]] inline double magic_bound_value(double keogh, double dtw_value, double f) {
  if (f <= 0.0) return keogh;
  if (f >= 1.0) return dtw_value;
  return keogh + f * (dtw_value - keogh);
}

/// LB_Keogh(query, candidate) + f * (DTW - LB_Keogh).
[[nodiscard]] inline double magic_bound(Series query, Series candidate, std::size_t window, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("magic bound fraction must lie in [0, 1]");
  return magic_bound_value(lb_keogh(query, candidate, window), dtw(query, candidate, window), f);
}

/// Precomputed exact DTW distances from one query to every database item,
/// which the magic bounds are allowed to read for free.
struct DtwOracle {
  std::vector<double> distances;
};

[[nodiscard]] inline DtwOracle make_dtw_oracle(Series query, std::span<const TimeSeries> database, std::size_t window,
                                                std::size_t threads = 1) {
  DtwOracle oracle{std::vector<double>(database.size())};
  parallel_for(database.size(), threads,
               [&](std::size_t i) { oracle.distances[i] = dtw(query, database[i], window); });
  return oracle;
}

/// Lower-bounding sequential scan for the exact 1NN under DTW with the given
/// window. A candidate whose bound is not below best_so_far is pruned; ties
/// in distance keep the lowest index. With a magic bound, `oracle` must hold
/// the query's true DTW distances (it is built on the fly when absent, outside
/// the timed region).
[[nodiscard]] inline ScanReport lb_sequential_scan(Series query, std::span<const TimeSeries> database,
                                                   const ScanConfig& cfg, const DtwOracle* oracle = nullptr) {
  if (database.empty()) throw EmptyInputError("scan: empty database");
  for (const auto& c : database) {
    if (c.size() != query.size()) throw ShapeError("scan: candidate length differs from query length");
  }
  DtwOracle local;
  if (cfg.bound.kind == BoundKind::magic && oracle == nullptr) {
    local = make_dtw_oracle(query, database, cfg.window);
    oracle = &local;
  }
  if (oracle != nullptr && oracle->distances.size() != database.size()) {
    throw ShapeError("scan: oracle size differs from database size");
  }

  const std::size_t size = database.size();
  ScanReport report;
  const auto start = std::chrono::steady_clock::now();

  Envelope env;
  if (cfg.bound.kind != BoundKind::none) env = make_envelope(query, cfg.window);

  // Works in squared units; the magic interpolation needs true distances.
  auto bound_sq = [&](std::size_t i, double cutoff_sq) -> double {
    switch (cfg.bound.kind) {
      case BoundKind::none: return 0.0;
      case BoundKind::keogh: return lb_keogh_squared(env, database[i], cutoff_sq);
      case BoundKind::magic: {
        // Same (possibly abandoned) envelope pass as keogh; an abandoned
        // partial sum already exceeds the cutoff, and so does the magic value.
        const double lb = std::sqrt(lb_keogh_squared(env, database[i], cutoff_sq));
        const double v = magic_bound_value(lb, oracle->distances[i], cfg.bound.fraction);
        return v * v;
      }
    }
    return 0.0;
  };

  double best_sq = kInf;
  // Without a bound every candidate gets its full DTW.
  const bool prunes = cfg.bound.kind != BoundKind::none;
  auto visit = [&](std::size_t i, double lb_sq) {
    if (prunes && !(lb_sq < best_sq)) {
      ++report.pruned_count;
      return;
    }
    ++report.full_dtw_count;
    double d_sq = 0.0;
    if (!cfg.early_abandon) {
      d_sq = dtw_squared(query, database[i], cfg.window);
    } else if (cfg.bound.kind == BoundKind::none) {
      d_sq = dtw_squared(query, database[i], cfg.window, best_sq);
    } else {
      // Rows run over the candidate so the envelope terms of the rows not yet
      // reached tighten the abandoning test.
      d_sq = dtw_squared(database[i], query, cfg.window, best_sq, lb_keogh_tail(env, database[i]));
    }
    if (d_sq < best_sq || (d_sq == best_sq && i < report.nn_index)) {
      best_sq = d_sq;
      report.nn_index = i;
    }
  };

  if (cfg.ordering == Ordering::natural) {
    for (std::size_t i = 0; i < size; ++i) {
      const double lb_sq = bound_sq(i, cfg.early_abandon ? best_sq : kInf);
      if (cfg.bound.kind != BoundKind::none) ++report.lb_evaluations;
      visit(i, lb_sq);
    }
  } else {
    std::vector<std::pair<double, std::size_t>> order(size);
    for (std::size_t i = 0; i < size; ++i) {
      order[i] = {bound_sq(i, kInf), i};
      if (cfg.bound.kind != BoundKind::none) ++report.lb_evaluations;
    }
    std::sort(order.begin(), order.end());
    for (std::size_t r = 0; r < size; ++r) {
      if (prunes && !(order[r].first < best_sq)) {
        // Every remaining bound is at least as large.
        report.pruned_count += size - r;
        break;
      }
      visit(order[r].second, order[r].first);
    }
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report.nn_distance = std::sqrt(best_sq);
  report.pruning_fraction = static_cast<double>(report.pruned_count) / static_cast<double>(size);
  return report;
}

/// n * P + n * w * (1 - P): unit cost of a scan step when a fraction P of the
/// DTW computations is pruned by a linear-time bound.
[[nodiscard]] inline double amortized_cost_model(double n, double w, double pruned_fraction) {
  if (!(pruned_fraction >= 0.0 && pruned_fraction <= 1.0)) throw ConfigError("P must lie in [0, 1]");
  if (n < 1.0 || w < 1.0) throw ConfigError("n and w must be at least 1");
  return pruned_fraction * n + (1.0 - pruned_fraction) * n * w;
}

struct TightnessReport {
  double mean{0.0};
  std::size_t samples{0};
  std::size_t skipped{0};
};

/// Mean of bound / DTW over random (query, candidate) pairs. Queries come
/// from `query_source`, candidates uniformly from `database`; pairs with
/// zero DTW are skipped and counted.
template <typename QuerySource>
[[nodiscard]] TightnessReport tightness_T(QuerySource&& query_source, std::span<const TimeSeries> database,
                                          std::size_t window, std::size_t samples, std::uint64_t seed,
                                          Bound bound = Bound::keogh()) {
  if (samples < 1) throw ConfigError("tightness needs at least one sample");
  if (database.empty()) throw EmptyInputError("tightness: empty database");
  Rng rng(mix_seed(seed));
  TightnessReport out;
  double acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const TimeSeries q = query_source(rng);
    const auto& c = database[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(database.size()) - 1))];
    const double d = dtw(q, c, window);
    if (d == 0.0) {
      ++out.skipped;
      continue;
    }
    double lb = 0.0;
    switch (bound.kind) {
      case BoundKind::none: lb = 0.0; break;
      case BoundKind::keogh: lb = lb_keogh(q, c, window); break;
      case BoundKind::magic: lb = magic_bound_value(lb_keogh(q, c, window), d, bound.fraction); break;
    }
    acc += lb / d;
    ++out.samples;
  }
  if (out.samples == 0) throw DomainError("tightness undefined: every sampled pair has zero DTW distance");
  out.mean = acc / static_cast<double>(out.samples);
  return out;
}

struct MagicRow {
  std::size_t size;
  Bound bound;
  double mean_wall_ms;
  double mean_full_dtw;
  double mean_pruning;
};

struct MagicExperimentConfig {
  std::vector<std::size_t> sizes{512, 1024, 2048};
  std::vector<Bound> bounds{Bound::none(), Bound::keogh(), Bound::magic(0.5), Bound::magic(1.0)};
  std::size_t window{102};
  Ordering ordering{Ordering::natural};
  bool early_abandon{false};
  std::size_t threads{1};
};

/// Bound comparison experiment: for each database prefix size and bound, the
/// mean over queries of wall time, full DTW count and pruning fraction. Every
/// bound scans the candidates in the same order. `pool` must hold at least
/// max(sizes) items; databases are its prefixes.
[[nodiscard]] inline std::vector<MagicRow> magic_experiment(std::span<const TimeSeries> pool,
                                                             std::span<const TimeSeries> queries,
                                                             const MagicExperimentConfig& cfg) {
  if (queries.empty()) throw ConfigError("magic experiment needs at least one query");
  if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end())) throw ConfigError("sizes must be ascending");
  const std::size_t largest = cfg.sizes.empty() ? 0 : cfg.sizes.back();
  if (largest > pool.size()) throw SizeError("pool smaller than the largest database size");
  const bool needs_oracle = std::any_of(cfg.bounds.begin(), cfg.bounds.end(),
                                        [](const Bound& b) { return b.kind == BoundKind::magic; });

  // Per query, per (size, bound) cell.
  std::vector<std::vector<ScanReport>> results(queries.size());
  const std::size_t cells = cfg.sizes.size() * cfg.bounds.size();
  parallel_for(queries.size(), cfg.threads, [&](std::size_t q) {
    DtwOracle oracle;
    if (needs_oracle) oracle = make_dtw_oracle(queries[q], pool.first(largest), cfg.window);
    auto& out = results[q];
    out.resize(cells);
    for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
      const auto db = pool.first(cfg.sizes[si]);
      DtwOracle prefix;
      if (needs_oracle) prefix.distances.assign(oracle.distances.begin(), oracle.distances.begin() + static_cast<std::ptrdiff_t>(db.size()));
      for (std::size_t bi = 0; bi < cfg.bounds.size(); ++bi) {
        const ScanConfig sc{cfg.window, cfg.bounds[bi], cfg.ordering, cfg.early_abandon};
        out[si * cfg.bounds.size() + bi] =
            lb_sequential_scan(queries[q], db, sc, cfg.bounds[bi].kind == BoundKind::magic ? &prefix : nullptr);
      }
    }
  });

  std::vector<MagicRow> rows;
  const auto nq = static_cast<double>(queries.size());
  for (std::size_t si = 0; si < cfg.sizes.size(); ++si) {
    for (std::size_t bi = 0; bi < cfg.bounds.size(); ++bi) {
      MagicRow row{cfg.sizes[si], cfg.bounds[bi], 0.0, 0.0, 0.0};
      for (const auto& r : results) {
        const auto& rep = r[si * cfg.bounds.size() + bi];
        row.mean_wall_ms += rep.wall_ms;
        row.mean_full_dtw += static_cast<double>(rep.full_dtw_count);
        row.mean_pruning += rep.pruning_fraction;
      }
      row.mean_wall_ms /= nq;
      row.mean_full_dtw /= nq;
      row.mean_pruning /= nq;
      rows.push_back(row);
    }
  }
  return rows;
}

/// `size,bound,mean_wall_ms,mean_full_dtw,mean_P`. With `timing` off the wall
/// column is written as 0 so the table is reproducible byte for byte.
inline void write_csv(const std::vector<MagicRow>& rows, std::ostream& out, bool timing = true) {
  out << "size,bound,mean_wall_ms,mean_full_dtw,mean_P\n";
  for (const auto& r : rows) {
    out << r.size << ',' << bound_name(r.bound) << ',' << format_real(timing ? r.mean_wall_ms : 0.0) << ','
        << format_real(r.mean_full_dtw) << ',' << format_real(r.mean_pruning) << '\n';
  }
}

}  // namespace tsbench
