#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "data.hpp"
#include "distances.hpp"
#include "measure_spec.hpp"
#include "scan.hpp"
#include "util.hpp"

namespace tsbench {

/// Every parameter combination searched for one measure kind, in sweep
/// order (outer parameter first, each from min to max).
struct ParameterGrid {
  MeasureKind kind;
  std::vector<MeasureSpec> specs;
};

/// Tuning grids:
///  - dtw_c, lb_keogh: w = 1 .. round(0.25 n)
///  - lcss, edr: eps = 0.02 Stdv .. Stdv in steps of 0.02 Stdv (50 values)
///  - lcss_c: w x eps
///  - swale: eps x p, r = 50, p = 0 .. 50
///  - tquest: tau = Avg - Stdv .. Avg + Stdv in steps of 0.02 Stdv (101 values)
///  - everything else: a single parameter-free spec (erp uses g = 0).
/// `base` supplies the weights for ana, whose grid is the single base spec.
[[nodiscard]] inline ParameterGrid parameter_grid(MeasureKind kind, const DatasetStats& stats, std::size_t n,
                                                  const MeasureSpec* base = nullptr) {
  ParameterGrid grid{kind, {}};
  const bool eps_based = uses_epsilon(kind) || kind == MeasureKind::tquest;
  if (eps_based && !(stats.stdv > 0.0)) {
    throw DegenerateDataError(std::string(measure_name(kind)) + " grid needs a dataset standard deviation > 0");
  }
  std::vector<std::size_t> windows;
  for (std::size_t w = 1; w <= std::max<std::size_t>(1, round_half_up(0.25 * static_cast<double>(n))); ++w) {
    windows.push_back(w);
  }
  std::vector<double> eps;
  for (int i = 1; i <= 50; ++i) eps.push_back(0.02 * i * stats.stdv);

  auto spec = [&] {
    MeasureSpec s;
    s.kind = kind;
    return s;
  };
  switch (kind) {
    case MeasureKind::dtw_c:
    case MeasureKind::lb_keogh:
      for (auto w : windows) {
        auto s = spec();
        s.window_points = w;
        grid.specs.push_back(s);
      }
      break;
    case MeasureKind::lcss:
    case MeasureKind::edr:
      for (double e : eps) {
        auto s = spec();
        s.epsilon = e;
        grid.specs.push_back(s);
      }
      break;
    case MeasureKind::lcss_c:
      for (auto w : windows) {
        for (double e : eps) {
          auto s = spec();
          s.window_points = w;
          s.epsilon = e;
          grid.specs.push_back(s);
        }
      }
      break;
    case MeasureKind::swale:
      for (double e : eps) {
        for (int p = 0; p <= 50; ++p) {
          auto s = spec();
          s.epsilon = e;
          s.reward = 50.0;
          s.penalty = static_cast<double>(p);
          grid.specs.push_back(s);
        }
      }
      break;
    case MeasureKind::tquest:
      for (int i = 0; i <= 100; ++i) {
        auto s = spec();
        s.tau = stats.avg - stats.stdv + 0.02 * i * stats.stdv;
        grid.specs.push_back(s);
      }
      break;
    case MeasureKind::erp: {
      auto s = spec();
      s.g = 0.0;
      grid.specs.push_back(s);
      break;
    }
    case MeasureKind::ana:
      if (base == nullptr || base->kind != MeasureKind::ana) throw ConfigError("ana grid needs a base spec with weights");
      grid.specs.push_back(*base);
      break;
    default: grid.specs.push_back(spec()); break;
  }
  return grid;
}

// ---------------------------------------------------------------------------
// 1NN classification

namespace detail {

/// Index of the nearest training item; lowest index on ties. DTW kinds on
/// equal lengths go through the LB_Keogh-pruned scan, which returns the same
/// answer with far fewer full DTW evaluations.
inline std::size_t nearest_index(std::span<const TimeSeries> train, Series query, const MeasureSpec& spec) {
  if (train.empty()) throw EmptyInputError("1NN: empty training set");
  const bool same_len = std::all_of(train.begin(), train.end(), [&](const TimeSeries& t) { return t.size() == query.size(); });
  if ((spec.kind == MeasureKind::dtw_c || spec.kind == MeasureKind::dtw) && same_len) {
    const std::size_t window = spec.kind == MeasureKind::dtw ? query.size() : *spec.window_for(query.size());
    return lb_sequential_scan(query, train, ScanConfig{window, Bound::keogh(), Ordering::natural, true}).nn_index;
  }
  std::size_t best = 0;
  double best_d = kInf;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const double d = distance(spec, query, train[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline std::vector<TimeSeries> series_of(std::span<const LabeledSeries> items) {
  std::vector<TimeSeries> out;
  out.reserve(items.size());
  for (const auto& it : items) out.push_back(it.series);
  return out;
}

}  // namespace detail

/// Label of the nearest training item (lowest index on ties).
[[nodiscard]] inline std::string one_nn_classify(std::span<const LabeledSeries> train, Series query,
                                                 const MeasureSpec& spec) {
  const auto series = detail::series_of(train);
  return train[detail::nearest_index(series, query, spec)].label;
}

/// Error ratio of each item queried against all the others.
[[nodiscard]] inline double leave_one_out_error(std::span<const LabeledSeries> items, const MeasureSpec& spec) {
  const std::size_t n = items.size();
  if (n < 2) throw SizeError("leave-one-out needs at least two items");
  // Symmetric distance matrix, each pair evaluated once.
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(spec, items[i].series, items[j].series);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  std::size_t errors = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = n;
    double best_d = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (best == n || dist[i * n + j] < best_d) {
        best_d = dist[i * n + j];
        best = j;
      }
    }
    if (items[best].label != items[i].label) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(n);
}

struct TuningResult {
  MeasureSpec spec;
  double loo_error;
};

/// Exhaustive grid search minimizing leave-one-out error; the earliest spec
/// in grid order wins ties.
[[nodiscard]] inline TuningResult tune_parameters(std::span<const LabeledSeries> tuning_set, const ParameterGrid& grid,
                                                  std::size_t threads = 1) {
  if (grid.specs.empty()) throw ConfigError("empty parameter grid");
  if (grid.specs.size() == 1) return {grid.specs.front(), kInf};
  std::vector<double> errors(grid.specs.size());
  parallel_for(grid.specs.size(), threads,
               [&](std::size_t g) { errors[g] = leave_one_out_error(tuning_set, grid.specs[g]); });
  const auto best = static_cast<std::size_t>(std::distance(errors.begin(), std::min_element(errors.begin(), errors.end())));
  return {grid.specs[best], errors[best]};
}

/// Fraction of `test` misclassified by 1NN over `train`.
[[nodiscard]] inline double classification_error(std::span<const LabeledSeries> train,
                                                 std::span<const LabeledSeries> test, const MeasureSpec& spec,
                                                 std::size_t threads = 1) {
  if (test.empty()) throw EmptyInputError("empty testing set");
  const auto series = detail::series_of(train);
  std::vector<char> wrong(test.size(), 0);
  parallel_for(test.size(), threads, [&](std::size_t i) {
    wrong[i] = train[detail::nearest_index(series, test[i].series, spec)].label != test[i].label ? 1 : 0;
  });
  return static_cast<double>(std::count(wrong.begin(), wrong.end(), 1)) / static_cast<double>(test.size());
}

// ---------------------------------------------------------------------------
// Cross-validation

/// Item indices (into the dataset) used by one fold.
struct FoldPlan {
  std::size_t fold{0};
  std::vector<std::size_t> tuning;
  std::vector<std::size_t> training;
  std::vector<std::size_t> testing;
};

/// Tuning items must come from the training items, and neither may touch the
/// testing items. Violations raise HygieneError.
inline void check_fold_hygiene(const FoldPlan& plan) {
  const std::set<std::size_t> train(plan.training.begin(), plan.training.end());
  const std::set<std::size_t> test(plan.testing.begin(), plan.testing.end());
  for (auto i : plan.tuning) {
    if (test.count(i)) {
      throw HygieneError("fold " + std::to_string(plan.fold) + ": tuning item " + std::to_string(i) +
                         " is also a testing item");
    }
    if (!train.count(i)) {
      throw HygieneError("fold " + std::to_string(plan.fold) + ": tuning item " + std::to_string(i) +
                         " is not in the training subset");
    }
  }
  for (auto i : plan.training) {
    if (test.count(i)) {
      throw HygieneError("fold " + std::to_string(plan.fold) + ": training item " + std::to_string(i) +
                         " is also a testing item");
    }
  }
}

struct CrossValidationConfig {
  std::size_t k{10};
  std::uint64_t seed{0};
  /// Train on k-1 subsets and test on one, instead of the default inverted
  /// roles (train on one subset, test on the other k-1).
  bool conventional{false};
  std::size_t threads{1};
};

/// Builds the fold plans: one stratified split of the whole dataset, then,
/// when tuning is needed, a stratified halving of each training subset whose
/// first half is the tuning set. Halving seeds are derived from (seed, fold),
/// so the plans do not depend on evaluation order.
[[nodiscard]] inline std::vector<FoldPlan> make_fold_plans(const Dataset& dataset, const CrossValidationConfig& cfg,
                                                           bool needs_tuning) {
  if (cfg.k < 2) throw SizeError("cross-validation needs k >= 2");
  const auto parts = stratified_split_indices(dataset.items(), cfg.k, cfg.seed);
  std::vector<FoldPlan> plans(cfg.k);
  for (std::size_t f = 0; f < cfg.k; ++f) {
    auto& plan = plans[f];
    plan.fold = f;
    std::vector<std::size_t> others;
    for (std::size_t g = 0; g < cfg.k; ++g) {
      if (g != f) others.insert(others.end(), parts[g].begin(), parts[g].end());
    }
    std::sort(others.begin(), others.end());
    plan.training = cfg.conventional ? others : parts[f];
    plan.testing = cfg.conventional ? parts[f] : others;
    if (needs_tuning) {
      const auto sub = dataset.subset(plan.training);
      if (plan.training.size() >= 4) {
        const auto halves = stratified_split_indices(sub.items(), 2, derive_seed(cfg.seed, 0x7475, f));
        for (auto i : halves[0]) plan.tuning.push_back(plan.training[i]);
      } else {
        // Too small to halve: tune on the whole (training-only) subset.
        plan.tuning = plan.training;
      }
    }
  }
  return plans;
}

struct FoldResult {
  double error{0.0};
  MeasureSpec chosen;
};

/// Runs one fold: hygiene check, tuning (if the grid has more than one
/// spec), then 1NN over the fold's training/testing split.
[[nodiscard]] inline FoldResult run_fold(const Dataset& dataset, const FoldPlan& plan, const ParameterGrid& grid,
                                         std::size_t threads = 1) {
  check_fold_hygiene(plan);
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::vector<LabeledSeries> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(dataset[i]);
    return out;
  };
  MeasureSpec chosen = grid.specs.front();
  if (grid.specs.size() > 1 && plan.tuning.size() >= 2) {
    chosen = tune_parameters(pick(plan.tuning), grid, threads).spec;
  }
  const auto train = pick(plan.training);
  const auto test = pick(plan.testing);
  return {classification_error(train, test, chosen, threads), chosen};
}

struct EvalReport {
  std::string dataset;
  MeasureKind kind{MeasureKind::l2};
  std::size_t k{0};
  std::vector<double> fold_errors;
  std::vector<MeasureSpec> chosen;
  double mean{0.0};
  /// Sample standard deviation (k - 1 denominator) of the fold errors.
  double stdev{0.0};
};

inline void summarize(EvalReport& r) {
  const auto k = static_cast<double>(r.fold_errors.size());
  r.mean = std::accumulate(r.fold_errors.begin(), r.fold_errors.end(), 0.0) / k;
  double ss = 0.0;
  for (double e : r.fold_errors) ss += (e - r.mean) * (e - r.mean);
  r.stdev = r.fold_errors.size() > 1 ? std::sqrt(ss / (k - 1.0)) : 0.0;
}

/// k-subset 1NN cross-validation with leave-one-out tuning on half of each
/// training subset. `grid` defaults to parameter_grid(kind, stats, n); pass
/// a single-spec grid to evaluate fixed parameters.
[[nodiscard]] inline EvalReport cross_validate(const Dataset& dataset, const ParameterGrid& grid,
                                               const CrossValidationConfig& cfg) {
  if (cfg.k > dataset.size()) {
    throw SizeError("k = " + std::to_string(cfg.k) + " exceeds dataset size " + std::to_string(dataset.size()));
  }
  const auto plans = make_fold_plans(dataset, cfg, grid.specs.size() > 1);
  EvalReport report{dataset.name(), grid.kind, cfg.k, std::vector<double>(cfg.k), std::vector<MeasureSpec>(cfg.k), 0, 0};
  // Parallelism goes inside the fold (grid points, test queries); folds run
  // in order so results are slot-indexed and thread-count independent.
  for (std::size_t f = 0; f < cfg.k; ++f) {
    const auto res = run_fold(dataset, plans[f], grid, cfg.threads);
    report.fold_errors[f] = res.error;
    report.chosen[f] = res.chosen;
  }
  summarize(report);
  return report;
}

[[nodiscard]] inline EvalReport cross_validate(const Dataset& dataset, MeasureKind kind,
                                               const CrossValidationConfig& cfg) {
  return cross_validate(dataset, parameter_grid(kind, dataset.stats(), dataset.series_length()), cfg);
}

/// `dataset,measure,k,fold,error,chosen_params`, one row per fold plus a
/// `summary` row carrying the mean error and the standard deviation.
inline void write_csv(const EvalReport& r, std::ostream& out) {
  out << "dataset,measure,k,fold,error,chosen_params\n";
  const auto prefix = csv_field(r.dataset) + "," + std::string(measure_name(r.kind)) + "," + std::to_string(r.k) + ",";
  for (std::size_t f = 0; f < r.fold_errors.size(); ++f) {
    out << prefix << f << ',' << format_real(r.fold_errors[f]) << ',' << csv_field(to_string(r.chosen[f])) << '\n';
  }
  out << prefix << "summary," << format_real(r.mean) << ',' << csv_field("std=" + format_real(r.stdev)) << '\n';
}

/// `dataset measure mean±std`
[[nodiscard]] inline std::string summary_line(const EvalReport& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f±%.4f", r.mean, r.stdev);
  return r.dataset + " " + std::string(measure_name(r.kind)) + " " + buf;
}

// ---------------------------------------------------------------------------
// Training-set size convergence

struct ConvergenceRow {
  std::size_t train_size;
  std::string measure;
  double error;
};

struct ConvergenceConfig {
  std::vector<std::size_t> train_sizes{50, 100, 200, 400, 800, 1600, 3200, 6400};
  std::size_t test_size{1000};
  std::size_t length{128};
  std::vector<MeasureSpec> measures;  // empty: L2 and DTW with a 10% window
  std::uint64_t seed{0};
  std::size_t threads{1};
};

[[nodiscard]] inline std::vector<MeasureSpec> default_convergence_measures() {
  MeasureSpec l2;
  l2.kind = MeasureKind::l2;
  MeasureSpec dtw10;
  dtw10.kind = MeasureKind::dtw_c;
  dtw10.window_fraction = 0.10;
  return {l2, dtw10};
}

/// Fresh i.i.d. z-normalized train and test draws for each training size;
/// 1NN error per measure.
[[nodiscard]] inline std::vector<ConvergenceRow> convergence_experiment(Generator generator,
                                                                        const ConvergenceConfig& cfg) {
  const auto measures = cfg.measures.empty() ? default_convergence_measures() : cfg.measures;
  std::vector<ConvergenceRow> rows;
  for (std::size_t si = 0; si < cfg.train_sizes.size(); ++si) {
    const auto train = z_normalize(gen_iid(generator, cfg.train_sizes[si], cfg.length, derive_seed(cfg.seed, si, 1)));
    const auto test = z_normalize(gen_iid(generator, cfg.test_size, cfg.length, derive_seed(cfg.seed, si, 2)));
    for (const auto& m : measures) {
      rows.push_back({cfg.train_sizes[si], to_string(m),
                      classification_error(train.items(), test.items(), m, cfg.threads)});
    }
  }
  return rows;
}

inline void write_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
  out << "train_size,measure,error\n";
  for (const auto& r : rows) out << r.train_size << ',' << csv_field(r.measure) << ',' << format_real(r.error) << '\n';
}

}  // namespace tsbench
