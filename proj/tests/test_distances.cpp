#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tsbench/distances.hpp"
#include "tsbench/measure_spec.hpp"

using namespace tsbench;
using oracle::Vec;

namespace {

std::mt19937_64 rng_for(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace

// ---------------------------------------------------------------------------
// Lock-step

TEST(LpNorm, PythagoreanTriple) {
  const Vec a{0, 0, 0}, b{3, 4, 0};
  EXPECT_DOUBLE_EQ(lp_norm(a, b, Norm::l2), 5.0);
  EXPECT_DOUBLE_EQ(euclidean(a, b), 5.0);
}

TEST(LpNorm, MaximumNorm) {
  const Vec a{1, 2}, b{1, 5};
  EXPECT_DOUBLE_EQ(lp_norm(a, b, Norm::linf), 3.0);
}

TEST(LpNorm, ManhattanMatchesDirectSum) {
  auto rng = rng_for(1);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_vec(rng, 50), b = oracle::random_vec(rng, 50);
    double direct = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) direct += std::abs(a[i] - b[i]);
    EXPECT_NEAR(lp_norm(a, b, Norm::l1), direct, 1e-12 * direct);
  }
}

TEST(LpNorm, LengthMismatchThrows) {
  const Vec a{1, 2}, b{1, 2, 3};
  EXPECT_THROW((void)lp_norm(a, b, Norm::l1), ShapeError);
}

TEST(Dissim, IdenticalIsZero) {
  const Vec a{1, -2, 3, 0.5};
  EXPECT_EQ(dissim(a, a), 0.0);
}

TEST(Dissim, ConstantOffset) {
  const Vec a{1, 2, 3, 4, 5};
  Vec b = a;
  for (auto& v : b) v -= 0.75;
  EXPECT_NEAR(dissim(a, b), 0.75 * 4, 1e-12);
}

TEST(Dissim, MatchesQuadrature) {
  auto rng = rng_for(2);
  for (int t = 0; t < 50; ++t) {
    const auto a = oracle::random_vec(rng, 30), b = oracle::random_vec(rng, 30);
    const double q = oracle::dissim_quadrature(a, b, 1000);
    EXPECT_NEAR(dissim(a, b), q, 1e-6 * q);
  }
}

// ---------------------------------------------------------------------------
// DTW

TEST(Dtw, SelfDistanceIsZero) {
  const Vec x{0.3, -1, 2, 2, 0};
  EXPECT_EQ(dtw(x, x), 0.0);
  EXPECT_EQ(dtw(x, x, 0), 0.0);
  EXPECT_EQ(dtw(x, x, 2), 0.0);
}

TEST(Dtw, WarpingAbsorbsUnitShift) {
  const Vec a{0, 0, 1, 0, 0}, b{0, 1, 0, 0, 0};
  EXPECT_EQ(dtw(a, b), 0.0);
}

TEST(Dtw, ZeroWindowIsEuclidean) {
  auto rng = rng_for(3);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_vec(rng, 40), b = oracle::random_vec(rng, 40);
    EXPECT_DOUBLE_EQ(dtw(a, b, 0), euclidean(a, b));
  }
}

TEST(Dtw, MatchesExhaustivePathOracle) {
  auto rng = rng_for(4);
  std::uniform_int_distribution<int> len(1, 7);
  for (int t = 0; t < 150; ++t) {
    const auto a = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    EXPECT_NEAR(dtw(a, b), oracle::dtw_paths(a, b), 1e-9) << "trial " << t;
  }
}

TEST(Dtw, BandedMatchesConstrainedPathOracle) {
  auto rng = rng_for(5);
  std::uniform_int_distribution<int> len(1, 8);
  for (int t = 0; t < 150; ++t) {
    const auto n = static_cast<std::size_t>(len(rng));
    const auto a = oracle::random_vec(rng, n), b = oracle::random_vec(rng, n);
    const long w = std::uniform_int_distribution<long>(0, static_cast<long>(n))(rng);
    EXPECT_NEAR(dtw(a, b, static_cast<std::size_t>(w)), oracle::dtw_paths(a, b, w), 1e-9) << "trial " << t;
  }
}

TEST(Dtw, NonIncreasingInWindow) {
  auto rng = rng_for(6);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_walk(rng, 32), b = oracle::random_walk(rng, 32);
    double prev = dtw(a, b, 0);
    for (std::size_t w = 1; w <= 32; ++w) {
      const double d = dtw(a, b, w);
      EXPECT_LE(d, prev);
      prev = d;
    }
  }
}

TEST(Dtw, UnequalLengthsWithZeroWindowStillConnected) {
  const Vec a{1, 2, 3}, b{1, 2, 2, 3, 3};
  const double d = dtw(a, b, 0);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_EQ(d, 0.0);
}

TEST(Dtw, EarlyAbandonNeverHidesACloserResult) {
  auto rng = rng_for(7);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_vec(rng, 24), b = oracle::random_vec(rng, 24);
    const double exact = dtw_squared(a, b, 3);
    const double cutoff = exact * std::uniform_real_distribution<double>(0.5, 1.5)(rng);
    const double abandoned = dtw_squared(a, b, 3, cutoff);
    if (exact <= cutoff) EXPECT_EQ(abandoned, exact);
    else EXPECT_GT(abandoned, cutoff);
    const auto env = make_envelope(b, 3);
    const double tail = dtw_squared(a, b, 3, cutoff, lb_keogh_tail(env, a));
    if (exact <= cutoff) EXPECT_EQ(tail, exact);
    else EXPECT_GT(tail, cutoff);
  }
}

TEST(Dtw, EmptyInputThrows) {
  const Vec a{}, b{1.0};
  EXPECT_THROW((void)dtw(a, b), DomainError);
}

// ---------------------------------------------------------------------------
// LB_Keogh

TEST(LbKeogh, SelfIsZero) {
  const Vec x{3, 1, 4, 1, 5, 9, 2, 6};
  for (std::size_t w = 0; w < 8; ++w) EXPECT_EQ(lb_keogh(x, x, w), 0.0);
}

TEST(LbKeogh, GlobalEnvelopeContainsEverything) {
  const Vec q{0, 5, -2, 1}, c{4, -1, 0, 3};
  EXPECT_EQ(lb_keogh(q, c, 4), 0.0);
}

TEST(LbKeogh, EnvelopeMatchesBruteForce) {
  auto rng = rng_for(8);
  for (int t = 0; t < 50; ++t) {
    const auto q = oracle::random_vec(rng, 40);
    const std::size_t w = static_cast<std::size_t>(t % 12);
    const auto env = make_envelope(q, w);
    for (std::size_t i = 0; i < q.size(); ++i) {
      double hi = -1e300, lo = 1e300;
      for (std::size_t j = (i >= w ? i - w : 0); j <= std::min(q.size() - 1, i + w); ++j) {
        hi = std::max(hi, q[j]);
        lo = std::min(lo, q[j]);
      }
      EXPECT_EQ(env.upper[i], hi);
      EXPECT_EQ(env.lower[i], lo);
    }
  }
}

TEST(LbKeogh, NeverExceedsDtw) {
  auto rng = rng_for(9);
  for (int t = 0; t < 2000; ++t) {
    const auto q = oracle::random_walk(rng, 64), c = oracle::random_walk(rng, 64);
    const std::size_t w = static_cast<std::size_t>(t % 17);
    EXPECT_LE(lb_keogh(q, c, w), dtw(q, c, w) + 1e-12);
  }
}

// ---------------------------------------------------------------------------
// LCSS / EDR / ERP / Swale

TEST(Lcss, SelfIsZero) {
  const Vec x{1, 2, 3, 2, 1};
  EXPECT_EQ(lcss(x, x, 0.1), 0.0);
}

TEST(Lcss, ZeroEpsilonMatchesNothing) {
  const Vec a{1, 2, 3}, b{1, 2, 3};
  EXPECT_EQ(lcss(a, b, 0.0), 1.0);
}

TEST(Lcss, MatchesSubsetEnumeration) {
  auto rng = rng_for(10);
  std::uniform_int_distribution<int> len(1, 8);
  for (int t = 0; t < 150; ++t) {
    const auto a = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const double eps = 0.25 * (t % 5);
    EXPECT_NEAR(lcss(a, b, eps), oracle::lcss_distance(a, b, eps), 1e-12) << "trial " << t;
    const long w = t % 4;
    EXPECT_NEAR(lcss(a, b, eps, static_cast<std::size_t>(w)), oracle::lcss_distance(a, b, eps, w), 1e-12);
  }
}

TEST(Edr, SelfIsZero) {
  const Vec x{0.1, 0.2, -3};
  EXPECT_EQ(edr(x, x, 0.0), 0.0);
}

TEST(Edr, AgainstEmptyCountsDeletions) {
  const Vec x{1, 2, 3, 4}, e{};
  EXPECT_EQ(edr(x, e, 0.5), 4.0);
  EXPECT_EQ(edr(e, x, 0.5), 4.0);
}

TEST(Edr, MatchesRecursiveDefinition) {
  auto rng = rng_for(11);
  std::uniform_int_distribution<int> len(0, 8);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const double eps = 0.25 * (t % 5);
    EXPECT_EQ(edr(a, b, eps), oracle::edr_recursive(a, b, eps)) << "trial " << t;
  }
}

TEST(Erp, AgainstEmptyIsAbsoluteSum) {
  const Vec x{1, -2, 3.5}, e{};
  EXPECT_DOUBLE_EQ(erp(x, e, 0.0), 6.5);
}

TEST(Erp, SelfIsZeroForAnyGap) {
  const Vec x{1, -2, 3.5};
  EXPECT_EQ(erp(x, x, 0.0), 0.0);
  EXPECT_EQ(erp(x, x, 7.0), 0.0);
}

TEST(Erp, MatchesRecursiveDefinition) {
  auto rng = rng_for(12);
  std::uniform_int_distribution<int> len(0, 8);
  for (int t = 0; t < 200; ++t) {
    const auto a = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    const double g = (t % 3) * 0.5;
    EXPECT_NEAR(erp(a, b, g), oracle::erp_recursive(a, b, g), 1e-9) << "trial " << t;
  }
}

TEST(Erp, TriangleInequality) {
  auto rng = rng_for(13);
  std::uniform_int_distribution<int> len(16, 64);
  for (int t = 0; t < 1000; ++t) {
    const auto a = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    const auto c = oracle::random_vec(rng, static_cast<std::size_t>(len(rng)));
    EXPECT_LE(erp(a, c), erp(a, b) + erp(b, c) + 1e-9);
  }
}

TEST(Swale, SelfScoresFullReward) {
  const Vec x{1, 2, 3, 4};
  EXPECT_EQ(swale(x, x, 0.1, 50, 5), 200.0);
  EXPECT_EQ(swale_distance(x, x, 0.1, 50, 5), 0.0);
}

TEST(Swale, AgainstEmptyPaysEveryGap) {
  const Vec x{1, 2, 3}, e{};
  EXPECT_EQ(swale(x, e, 0.1, 50, 4), -12.0);
}

TEST(Swale, MatchesAlignmentEnumeration) {
  auto rng = rng_for(14);
  std::uniform_int_distribution<int> len(0, 8);
  for (int t = 0; t < 150; ++t) {
    const auto a = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const auto b = oracle::random_quantized(rng, static_cast<std::size_t>(len(rng)));
    const double eps = 0.25 * (t % 5);
    const double p = static_cast<double>(t % 7) * 5.0;
    EXPECT_NEAR(swale(a, b, eps, 50, p), oracle::swale_score(a, b, eps, 50, p), 1e-9) << "trial " << t;
  }
}

TEST(Swale, PenaltyOutsideRangeRejected) {
  const Vec x{1, 2};
  EXPECT_THROW((void)swale(x, x, 0.1, 50, 60), ConfigError);
  EXPECT_THROW((void)swale(x, x, 0.1, 50, -1), ConfigError);
}

// ---------------------------------------------------------------------------
// TQuEST

TEST(Tquest, BothEmptyIntervalSetsIsZero) {
  const Vec a{0, 1, 0}, b{0.5, 0.2, 0.1};
  EXPECT_EQ(tquest(a, b, 5.0), 0.0);
}

TEST(Tquest, SelfIsZero) {
  const Vec x{0, 2, 2, 0, 3, 0};
  EXPECT_EQ(tquest(x, x, 1.0), 0.0);
}

TEST(Tquest, SingleIntervalPair) {
  // Threshold 0: crossings fall exactly on samples, giving interval points
  // (1, 3) and (2, 5).
  const Vec a{0, 0, 1, 0, 0, 0, 0}, b{0, 0, 0, 1, 1, 0, 0};
  const auto ia = threshold_intervals(a, 0.0), ib = threshold_intervals(b, 0.0);
  ASSERT_EQ(ia.size(), 1u);
  ASSERT_EQ(ib.size(), 1u);
  EXPECT_EQ(ia[0].start, 1.0);
  EXPECT_EQ(ia[0].end, 3.0);
  EXPECT_EQ(ib[0].start, 2.0);
  EXPECT_EQ(ib[0].end, 5.0);
  EXPECT_NEAR(tquest(a, b, 0.0), 2.0 * std::sqrt(5.0), 1e-12);
}

TEST(Tquest, OneEmptySetGivesLength) {
  const Vec a{0, 2, 0}, b{0, 0.1, 0};
  EXPECT_EQ(tquest(a, b, 1.0), 3.0);
}

TEST(Tquest, MatchesNearestNeighborOracle) {
  auto rng = rng_for(15);
  for (int t = 0; t < 100; ++t) {
    const auto a = oracle::random_vec(rng, 40), b = oracle::random_vec(rng, 40);
    const auto ia = threshold_intervals(a, 0.3), ib = threshold_intervals(b, 0.3);
    if (ia.empty() || ib.empty()) continue;
    auto side = [](const auto& from, const auto& to) {
      double s = 0.0;
      for (const auto& x : from) {
        double best = 1e300;
        for (const auto& y : to) {
          const double ds = static_cast<double>(x.start) - static_cast<double>(y.start);
          const double de = static_cast<double>(x.end) - static_cast<double>(y.end);
          best = std::min(best, std::sqrt(ds * ds + de * de));
        }
        s += best;
      }
      return s / static_cast<double>(from.size());
    };
    EXPECT_NEAR(tquest(a, b, 0.3), side(ia, ib) + side(ib, ia), 1e-9);
  }
}

// ---------------------------------------------------------------------------
// ANA

TEST(Ana, UnitWeightsAreEuclidean) {
  const Vec a{1, 2, 3}, b{2, 0, 3}, w{1, 1, 1};
  EXPECT_DOUBLE_EQ(ana(a, b, w), euclidean(a, b));
}

TEST(Ana, DnaMapping) {
  EXPECT_EQ(dna_weights("GATCA"), (std::vector<double>{2, 0, 3, 1, 0}));
  EXPECT_EQ(dna_weights("gatca"), (std::vector<double>{2, 0, 3, 1, 0}));
  EXPECT_THROW((void)dna_weights("GAXT"), ParseError);
}

TEST(Ana, ZeroWeightMasksPosition) {
  const Vec a{5, 1}, b{9, 1}, w{0, 1};
  EXPECT_EQ(ana(a, b, w), 0.0);
}

TEST(Ana, OffsetSelectsWindow) {
  const Vec a{1, 1}, b{0, 0}, w{0, 0, 1, 4};
  EXPECT_DOUBLE_EQ(ana(a, b, w, 2), std::sqrt(5.0));
  EXPECT_THROW((void)ana(a, b, w, 3), BoundsError);
}

// ---------------------------------------------------------------------------
// Measure specs

TEST(MeasureSpec, RoundTripsThroughText) {
  for (const char* text : {"l2", "dtw_c:w=5", "dtw_c:delta=0.1", "lcss_c:w=3,eps=0.25", "swale:eps=0.5,r=50,p=10",
                           "tquest:tau=0.3", "erp:g=0"}) {
    const auto s = parse_measure_spec(text);
    EXPECT_EQ(parse_measure_spec(to_string(s)).kind, s.kind);
    EXPECT_EQ(to_string(parse_measure_spec(to_string(s))), to_string(s)) << text;
  }
}

TEST(MeasureSpec, UnknownNameListsValidOnes) {
  try {
    (void)parse_measure_kind("warp");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("dtw"), std::string::npos);
  }
}

TEST(MeasureSpec, EveryKindIsSymmetricAndZeroOnSelf) {
  auto rng = rng_for(16);
  const auto a = oracle::random_vec(rng, 16), b = oracle::random_vec(rng, 16);
  for (auto kind : kAllMeasureKinds) {
    MeasureSpec s;
    s.kind = kind;
    if (uses_window(kind)) s.window_points = 3;
    if (uses_epsilon(kind)) s.epsilon = 0.5;
    if (kind == MeasureKind::tquest) s.tau = 0.2;
    if (kind == MeasureKind::ana) s.weights = std::vector<double>(16, 1.0);
    EXPECT_NEAR(distance(s, a, b), distance(s, b, a), 1e-12) << measure_name(kind);
    EXPECT_NEAR(distance(s, a, a), 0.0, 1e-12) << measure_name(kind);
  }
}
