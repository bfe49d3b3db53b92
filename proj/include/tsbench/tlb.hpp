#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "data.hpp"
#include "representations.hpp"
#include "util.hpp"

namespace tsbench {

/// Draws series of a requested length for TLB trials.
class SeriesSource {
 public:
  using Draw = std::function<TimeSeries(std::size_t length, Rng& rng)>;

  SeriesSource(std::string name, Draw draw) : name_(std::move(name)), draw_(std::move(draw)) {}

  static SeriesSource from_generator(Generator g) {
    return {std::string(generator_name(g)), [g](std::size_t n, Rng& rng) {
              const auto cls = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(class_count(g)) - 1));
              return z_normalize(gen_labeled(g, cls, n, rng).series.values());
            }};
  }

  /// Samples items with replacement. Longer items are cut at a random offset,
  /// shorter ones linearly resampled; the result is z-normalized.
  static SeriesSource from_dataset(const Dataset& dataset) {
    return {dataset.name(), [items = dataset.items()](std::size_t n, Rng& rng) {
              const auto pick = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(items.size()) - 1));
              const auto& src = items[pick].series;
              std::vector<double> out(n);
              if (src.size() >= n) {
                const auto start = static_cast<std::size_t>(
                    uniform_int(rng, 0, static_cast<std::int64_t>(src.size() - n)));
                std::copy(src.begin() + static_cast<std::ptrdiff_t>(start),
                          src.begin() + static_cast<std::ptrdiff_t>(start + n), out.begin());
              } else {
                const double scale = n > 1 ? static_cast<double>(src.size() - 1) / static_cast<double>(n - 1) : 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                  const double pos = static_cast<double>(i) * scale;
                  const auto lo = static_cast<std::size_t>(std::floor(pos));
                  const auto hi = std::min(lo + 1, src.size() - 1);
                  const double f = pos - static_cast<double>(lo);
                  out[i] = src[lo] * (1.0 - f) + src[hi] * f;
                }
              }
              return z_normalize(out);
            }};
  }

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] TimeSeries draw(std::size_t n, Rng& rng) const { return draw_(n, rng); }

 private:
  std::string name_;
  Draw draw_;
};

struct TlbRow {
  Method method;
  std::size_t n;
  std::size_t k;
  std::size_t trials;
  double mean_tlb;
  std::size_t clamp_events;
};

struct TlbReport {
  std::string source;
  std::vector<TlbRow> rows;
};

struct TlbExperimentConfig {
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<std::size_t> lengths{480, 960, 1440, 1920};
  std::vector<std::size_t> ks{4, 6, 8, 10};
  std::size_t trials{1000};
  std::uint64_t seed{0};
  std::size_t threads{1};
};

/// Mean TLB for every (method, n, k) cell. Trial pairs depend only on
/// (seed, n), so every method and budget sees the same pairs and the report
/// is identical for any thread count. Rows are ordered by method, n, k.
[[nodiscard]] inline TlbReport tlb_experiment(const SeriesSource& source, const TlbExperimentConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("tlb experiment needs at least one trial");
  struct Cell {
    Method method;
    std::size_t n_index, k;
  };
  std::vector<Cell> cells;
  for (auto m : cfg.methods) {
    for (std::size_t ni = 0; ni < cfg.lengths.size(); ++ni) {
      for (auto k : cfg.ks) cells.push_back({m, ni, k});
    }
  }
  // Draw the pairs once per length.
  std::vector<std::vector<std::pair<TimeSeries, TimeSeries>>> pairs(cfg.lengths.size());
  parallel_for(cfg.lengths.size(), cfg.threads, [&](std::size_t ni) {
    Rng rng(derive_seed(cfg.seed, ni));
    auto& out = pairs[ni];
    out.reserve(cfg.trials);
    while (out.size() < cfg.trials) {
      auto t = source.draw(cfg.lengths[ni], rng);
      auto s = source.draw(cfg.lengths[ni], rng);
      if (euclidean(t, s) == 0.0) continue;  // identical draw, TLB undefined
      out.emplace_back(std::move(t), std::move(s));
    }
  });

  TlbReport report{source.name(), std::vector<TlbRow>(cells.size())};
  parallel_for(cells.size(), cfg.threads, [&](std::size_t c) {
    const auto& cell = cells[c];
    const std::size_t n = cfg.lengths[cell.n_index];
    const Representation rep({cell.method, cell.k, n});
    double acc = 0.0;
    std::size_t clamps = 0;
    for (const auto& [t, s] : pairs[cell.n_index]) {
      const auto v = tlb_value(rep, t, s);
      acc += v.value;
      clamps += v.clamped ? 1 : 0;
    }
    report.rows[c] = {cell.method, n, cell.k, cfg.trials, acc / static_cast<double>(cfg.trials), clamps};
  });
  return report;
}

inline void write_csv(const TlbReport& report, std::ostream& out) {
  out << "method,n,k,trials,mean_tlb\n";
  for (const auto& r : report.rows) {
    out << method_name(r.method) << ',' << r.n << ',' << r.k << ',' << r.trials << ',' << format_real(r.mean_tlb)
        << '\n';
  }
}

}  // namespace tsbench
