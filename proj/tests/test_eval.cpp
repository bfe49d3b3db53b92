#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "tsbench/eval.hpp"

using namespace tsbench;

namespace {

MeasureSpec l2_spec() {
  MeasureSpec s;
  s.kind = MeasureKind::l2;
  return s;
}

MeasureSpec dtw_w(std::size_t w) {
  MeasureSpec s;
  s.kind = MeasureKind::dtw_c;
  s.window_points = w;
  return s;
}

Dataset small_cbf(std::size_t per_class, std::uint64_t seed, std::size_t length = 64) {
  return z_normalize(gen_dataset(Generator::cbf, per_class, length, seed));
}

std::size_t lines_of(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

// ---------------------------------------------------------------------------
// Grids

TEST(ParameterGrid, WindowedKinds) {
  const DatasetStats stats{0.0, 1.0, {}};
  const auto g = parameter_grid(MeasureKind::dtw_c, stats, 128);
  ASSERT_EQ(g.specs.size(), 32u);
  EXPECT_EQ(*g.specs.front().window_points, 1u);
  EXPECT_EQ(*g.specs.back().window_points, 32u);
  EXPECT_EQ(parameter_grid(MeasureKind::lb_keogh, stats, 10).specs.size(), 3u);  // round(2.5) = 3
  EXPECT_EQ(parameter_grid(MeasureKind::dtw_c, stats, 2).specs.size(), 1u);
}

TEST(ParameterGrid, EpsilonKinds) {
  const DatasetStats stats{0.3, 2.0, {}};
  const auto g = parameter_grid(MeasureKind::lcss, stats, 64);
  ASSERT_EQ(g.specs.size(), 50u);
  EXPECT_NEAR(*g.specs.front().epsilon, 0.04, 1e-12);
  EXPECT_NEAR(*g.specs.back().epsilon, 2.0, 1e-12);
  EXPECT_EQ(parameter_grid(MeasureKind::edr, stats, 64).specs.size(), 50u);
  EXPECT_EQ(parameter_grid(MeasureKind::lcss_c, stats, 64).specs.size(), 16u * 50u);
  const auto sw = parameter_grid(MeasureKind::swale, stats, 64);
  ASSERT_EQ(sw.specs.size(), 50u * 51u);
  EXPECT_EQ(*sw.specs[0].penalty, 0.0);
  EXPECT_EQ(*sw.specs[50].penalty, 50.0);
  EXPECT_EQ(*sw.specs[0].reward, 50.0);
}

TEST(ParameterGrid, TquestThresholds) {
  const DatasetStats stats{0.5, 2.0, {}};
  const auto g = parameter_grid(MeasureKind::tquest, stats, 64);
  ASSERT_EQ(g.specs.size(), 101u);
  EXPECT_NEAR(*g.specs.front().tau, -1.5, 1e-12);
  EXPECT_NEAR(*g.specs[50].tau, 0.5, 1e-12);
  EXPECT_NEAR(*g.specs.back().tau, 2.5, 1e-12);
}

TEST(ParameterGrid, ParameterFreeAndErrors) {
  const DatasetStats stats{0.0, 1.0, {}};
  for (auto k : {MeasureKind::l1, MeasureKind::l2, MeasureKind::linf, MeasureKind::dissim, MeasureKind::dtw,
                 MeasureKind::erp}) {
    EXPECT_EQ(parameter_grid(k, stats, 64).specs.size(), 1u) << measure_name(k);
  }
  EXPECT_EQ(*parameter_grid(MeasureKind::erp, stats, 64).specs[0].g, 0.0);
  EXPECT_THROW((void)parameter_grid(MeasureKind::lcss, DatasetStats{0.0, 0.0, {}}, 64), DegenerateDataError);
  EXPECT_THROW((void)parameter_grid(MeasureKind::ana, stats, 64), ConfigError);
}

TEST(ParameterGrid, EverySpecValidates) {
  const DatasetStats stats{0.0, 1.0, {}};
  for (auto k : {MeasureKind::dtw_c, MeasureKind::lb_keogh, MeasureKind::lcss, MeasureKind::lcss_c, MeasureKind::edr,
                 MeasureKind::swale, MeasureKind::tquest, MeasureKind::erp}) {
    for (const auto& s : parameter_grid(k, stats, 32).specs) EXPECT_NO_THROW(validate(s)) << to_string(s);
  }
}

// ---------------------------------------------------------------------------
// 1NN and leave-one-out

TEST(OneNN, TiesGoToLowestIndex) {
  const std::vector<LabeledSeries> train{{TimeSeries{1, 0}, "a"}, {TimeSeries{-1, 0}, "b"}, {TimeSeries{1, 0}, "c"}};
  EXPECT_EQ(one_nn_classify(train, TimeSeries{0, 0}, l2_spec()), "a");
  EXPECT_EQ(one_nn_classify(train, TimeSeries{-1, 0}, l2_spec()), "b");
  EXPECT_THROW((void)one_nn_classify(std::vector<LabeledSeries>{}, TimeSeries{0.0}, l2_spec()), EmptyInputError);
}

TEST(OneNN, PrunedDtwPathMatchesBruteForce) {
  const auto train = small_cbf(10, 3);
  const auto test = small_cbf(5, 4);
  const auto spec = dtw_w(6);
  for (const auto& q : test.items()) {
    std::size_t best = 0;
    double best_d = kInf;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const double d = dtw(q.series, train[i].series, 6);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    EXPECT_EQ(one_nn_classify(train.items(), q.series, spec), train[best].label);
  }
}

TEST(LeaveOneOut, MatchesMatrixOracle) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = small_cbf(6, 20 + seed, 64);
    for (const auto& spec : {l2_spec(), dtw_w(4), parse_measure_spec("lcss:eps=0.5"), parse_measure_spec("erp:g=0")}) {
      const std::size_t n = ds.size();
      std::vector<std::vector<double>> d(n, std::vector<double>(n));
      std::vector<int> labels;
      for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(std::stoi(ds[i].label));
        for (std::size_t j = 0; j < n; ++j) d[i][j] = distance(spec, ds[i].series, ds[j].series);
      }
      EXPECT_DOUBLE_EQ(leave_one_out_error(ds.items(), spec), oracle::loo_error(d, labels)) << to_string(spec);
    }
  }
}

TEST(LeaveOneOut, TooFewItems) {
  const std::vector<LabeledSeries> one{{TimeSeries{1.0}, "a"}};
  EXPECT_THROW((void)leave_one_out_error(one, l2_spec()), SizeError);
}

TEST(Tuning, PicksMinimumAndEarliestOnTies) {
  const auto ds = small_cbf(8, 7, 64);
  const auto grid = parameter_grid(MeasureKind::dtw_c, ds.stats(), ds.series_length());
  const auto res = tune_parameters(ds.items(), grid);
  std::vector<double> errs;
  for (const auto& s : grid.specs) errs.push_back(leave_one_out_error(ds.items(), s));
  const auto first_min = std::min_element(errs.begin(), errs.end()) - errs.begin();
  EXPECT_EQ(res.spec, grid.specs[static_cast<std::size_t>(first_min)]);
  EXPECT_DOUBLE_EQ(res.loo_error, errs[static_cast<std::size_t>(first_min)]);

  // A grid of identical-error specs: the first one wins.
  ParameterGrid same{MeasureKind::l2, {l2_spec(), l2_spec(), l2_spec()}};
  EXPECT_EQ(tune_parameters(ds.items(), same).spec, same.specs[0]);
  EXPECT_THROW((void)tune_parameters(ds.items(), ParameterGrid{MeasureKind::l2, {}}), ConfigError);
}

TEST(Tuning, ThreadCountDoesNotMatter) {
  const auto ds = small_cbf(6, 9, 64);
  const auto grid = parameter_grid(MeasureKind::lcss, ds.stats(), ds.series_length());
  const auto a = tune_parameters(ds.items(), grid, 1);
  const auto b = tune_parameters(ds.items(), grid, 4);
  EXPECT_EQ(a.spec, b.spec);
  EXPECT_EQ(a.loo_error, b.loo_error);
}

TEST(ClassificationError, CountsMistakes) {
  const std::vector<LabeledSeries> train{{TimeSeries{0, 0}, "a"}, {TimeSeries{10, 10}, "b"}};
  const std::vector<LabeledSeries> test{{TimeSeries{1, 1}, "a"}, {TimeSeries{9, 9}, "a"}, {TimeSeries{8, 8}, "b"},
                                        {TimeSeries{2, 2}, "b"}};
  EXPECT_DOUBLE_EQ(classification_error(train, test, l2_spec()), 0.5);
  EXPECT_THROW((void)classification_error(train, std::vector<LabeledSeries>{}, l2_spec()), EmptyInputError);
}

// ---------------------------------------------------------------------------
// Folds and hygiene

TEST(FoldPlans, InvertedAndConventionalRoles) {
  const auto ds = small_cbf(10, 1);
  CrossValidationConfig cfg;
  cfg.k = 5;
  cfg.seed = 3;
  const auto inverted = make_fold_plans(ds, cfg, true);
  cfg.conventional = true;
  const auto conventional = make_fold_plans(ds, cfg, true);
  ASSERT_EQ(inverted.size(), 5u);
  for (std::size_t f = 0; f < 5; ++f) {
    EXPECT_EQ(inverted[f].training.size(), 6u);
    EXPECT_EQ(inverted[f].testing.size(), 24u);
    EXPECT_EQ(conventional[f].training.size(), 24u);
    EXPECT_EQ(conventional[f].testing.size(), 6u);
    EXPECT_NO_THROW(check_fold_hygiene(inverted[f]));
    EXPECT_NO_THROW(check_fold_hygiene(conventional[f]));
    EXPECT_EQ(inverted[f].tuning.size(), 3u);
    std::set<std::size_t> all(inverted[f].training.begin(), inverted[f].training.end());
    all.insert(inverted[f].testing.begin(), inverted[f].testing.end());
    EXPECT_EQ(all.size(), ds.size());
  }
}

TEST(FoldPlans, NoTuningWhenNotNeeded) {
  const auto ds = small_cbf(4, 1);
  CrossValidationConfig cfg;
  cfg.k = 3;
  for (const auto& p : make_fold_plans(ds, cfg, false)) EXPECT_TRUE(p.tuning.empty());
  cfg.k = 1;
  EXPECT_THROW((void)make_fold_plans(ds, cfg, false), SizeError);
}

TEST(FoldHygiene, DetectsLeaks) {
  FoldPlan plan{0, {1, 2}, {1, 2, 3}, {4, 5}};
  EXPECT_NO_THROW(check_fold_hygiene(plan));
  auto leak_test = plan;
  leak_test.tuning.push_back(5);
  leak_test.training.push_back(5);
  EXPECT_THROW(check_fold_hygiene(leak_test), HygieneError);
  auto outside = plan;
  outside.tuning.push_back(7);
  EXPECT_THROW(check_fold_hygiene(outside), HygieneError);
  auto train_test = plan;
  train_test.training.push_back(4);
  EXPECT_THROW(check_fold_hygiene(train_test), HygieneError);
}

TEST(FoldHygiene, RunFoldRejectsMutatedPlan) {
  const auto ds = small_cbf(6, 2);
  CrossValidationConfig cfg;
  cfg.k = 3;
  auto plans = make_fold_plans(ds, cfg, true);
  plans[1].tuning.push_back(plans[1].testing.front());
  const auto grid = parameter_grid(MeasureKind::dtw_c, ds.stats(), ds.series_length());
  EXPECT_THROW((void)run_fold(ds, plans[1], grid), HygieneError);
  EXPECT_NO_THROW((void)run_fold(ds, plans[0], grid));
}

// ---------------------------------------------------------------------------
// Cross-validation

TEST(CrossValidate, DeterministicAndThreadInvariant) {
  const auto ds = small_cbf(8, 5, 64);
  CrossValidationConfig cfg;
  cfg.k = 4;
  cfg.seed = 17;
  const auto a = cross_validate(ds, MeasureKind::dtw_c, cfg);
  const auto b = cross_validate(ds, MeasureKind::dtw_c, cfg);
  cfg.threads = 3;
  const auto c = cross_validate(ds, MeasureKind::dtw_c, cfg);
  EXPECT_EQ(a.fold_errors, b.fold_errors);
  EXPECT_EQ(a.fold_errors, c.fold_errors);
  EXPECT_EQ(a.chosen, c.chosen);
  std::ostringstream sa, sc;
  write_csv(a, sa);
  write_csv(c, sc);
  EXPECT_EQ(sa.str(), sc.str());
}

TEST(CrossValidate, FixedSpecMatchesManualFolds) {
  const auto ds = small_cbf(5, 8);
  CrossValidationConfig cfg;
  cfg.k = 5;
  cfg.seed = 2;
  const ParameterGrid grid{MeasureKind::l2, {l2_spec()}};
  const auto rep = cross_validate(ds, grid, cfg);
  const auto parts = stratified_split_indices(ds.items(), 5, 2);
  for (std::size_t f = 0; f < 5; ++f) {
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < 5; ++g) {
      if (g != f) rest.insert(rest.end(), parts[g].begin(), parts[g].end());
    }
    const auto train = ds.subset(parts[f]);
    const auto test = ds.subset(rest);
    EXPECT_DOUBLE_EQ(rep.fold_errors[f], classification_error(train.items(), test.items(), l2_spec()));
  }
}

TEST(CrossValidate, SummaryStatistics) {
  EvalReport r;
  r.fold_errors = {0.1, 0.2, 0.3, 0.4};
  summarize(r);
  EXPECT_NEAR(r.mean, 0.25, 1e-15);
  EXPECT_NEAR(r.stdev, std::sqrt(0.05 / 3.0), 1e-15);
  r.dataset = "toy";
  r.kind = MeasureKind::l2;
  EXPECT_EQ(summary_line(r), "toy l2 0.2500±0.1291");
}

TEST(CrossValidate, CsvShapeAndErrors) {
  const auto ds = small_cbf(4, 3);
  CrossValidationConfig cfg;
  cfg.k = 3;
  const auto rep = cross_validate(ds, MeasureKind::l1, cfg);
  std::ostringstream out;
  write_csv(rep, out);
  EXPECT_EQ(lines_of(out.str()), 1u + 3u + 1u);
  EXPECT_EQ(out.str().rfind("dataset,measure,k,fold,error,chosen_params\n", 0), 0u);
  EXPECT_NE(out.str().find(",summary,"), std::string::npos);
  cfg.k = ds.size() + 1;
  EXPECT_THROW((void)cross_validate(ds, MeasureKind::l1, cfg), SizeError);
}

// ---------------------------------------------------------------------------
// Convergence

TEST(Convergence, RowsAndDeterminism) {
  ConvergenceConfig cfg;
  cfg.train_sizes = {10, 20};
  cfg.test_size = 30;
  cfg.length = 64;
  cfg.seed = 4;
  const auto a = convergence_experiment(Generator::cbf, cfg);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].measure, "l2");
  EXPECT_EQ(a[1].measure, to_string(default_convergence_measures()[1]));
  cfg.threads = 2;
  const auto b = convergence_experiment(Generator::cbf, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].error, b[i].error);
  std::ostringstream out;
  write_csv(a, out);
  EXPECT_EQ(lines_of(out.str()), 5u);
}
