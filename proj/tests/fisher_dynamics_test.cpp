#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>

#include <gtest/gtest.h>

#include "stackelberg/fisher_dynamics.hpp"

namespace stackelberg {
namespace {

Vec V2(double a, double b) { return (Vec(2) << a, b).finished(); }

FisherMarket MSym() {
  return FisherMarket(UtilityKind::kCobbDouglas, Mat::Constant(2, 2, 0.5), V2(1, 1), V2(1, 1));
}

FisherMarket MA() {
  return FisherMarket(UtilityKind::kCobbDouglas, (Mat(2, 2) << 0.5, 0.5, 0.75, 0.25).finished(),
                      V2(1, 2), V2(1, 1));
}

double Mean(const std::vector<double>& d, long from, long to) {
  return std::accumulate(d.begin() + (from - 1), d.begin() + to, 0.0) / (to - from + 1);
}

TEST(Sampling, DeterministicPerSeedAndStep) {
  const MarketRanges r = TatonnementRanges();
  const FisherMarket a = SampleOnlineMarket(UtilityKind::kLinear, 5, 8, r, 7, 12);
  const FisherMarket b = SampleOnlineMarket(UtilityKind::kLinear, 5, 8, r, 7, 12);
  EXPECT_EQ(a.valuations(), b.valuations());
  EXPECT_EQ(a.budgets(), b.budgets());
  EXPECT_EQ(a.supplies(), b.supplies());
  const FisherMarket c = SampleOnlineMarket(UtilityKind::kLinear, 5, 8, r, 7, 13);
  EXPECT_NE(a.budgets(), c.budgets());
  const FisherMarket d = SampleOnlineMarket(UtilityKind::kLinear, 5, 8, r, 8, 12);
  EXPECT_NE(a.budgets(), d.budgets());
}

TEST(Sampling, RangesRespected) {
  const MarketRanges r = MyopicRanges();
  for (long t = 1; t <= 50; ++t) {
    const FisherMarket m = SampleOnlineMarket(UtilityKind::kLeontief, 5, 8, r, 3, t);
    EXPECT_TRUE((m.budgets().array() >= 10.0).all() && (m.budgets().array() <= 15.0).all());
    EXPECT_TRUE((m.valuations().array() >= 10.0).all() &&
                (m.valuations().array() <= 20.0).all());
    EXPECT_TRUE((m.supplies().array() >= 10.0).all() && (m.supplies().array() <= 15.0).all());
  }
}

TEST(Sampling, DegenerateRangeAndNormalization) {
  const MarketRanges r{{3, 3}, {2, 2}, {4, 4}};
  const FisherMarket m = SampleOnlineMarket(UtilityKind::kLinear, 2, 3, r, 1, 1);
  EXPECT_TRUE((m.budgets().array() == 3.0).all());
  EXPECT_TRUE((m.valuations().array() == 2.0).all());
  EXPECT_TRUE((m.supplies().array() == 4.0).all());
  const FisherMarket cd = SampleOnlineMarket(UtilityKind::kCobbDouglas, 2, 4, TatonnementRanges(), 1, 1);
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(cd.valuations().row(i).sum(), 1.0, 1e-15);
}

TEST(Sampling, RejectsBadRanges) {
  EXPECT_THROW(ValidateRanges({{2, 1}, {1, 1}, {1, 1}}), Error);
  EXPECT_THROW(ValidateRanges({{1, 1}, {0, 1}, {1, 1}}), Error);
  EXPECT_THROW(SampleOnlineMarket(UtilityKind::kLinear, 1, 1, TatonnementRanges(), 1, 0), Error);
}

TEST(Sampling, UniformMean) {
  const MarketRanges r{{10, 20}, {1, 1}, {1, 1}};
  double sum = 0.0;
  const int draws = 100000;
  for (long t = 1; t <= draws / 10; ++t) {
    sum += SampleOnlineMarket(UtilityKind::kLinear, 10, 1, r, 99, t).budgets().sum();
  }
  EXPECT_NEAR(sum / draws, 15.0, 0.1);
}

TEST(Tatonnement, ClearingStartIsFixedPoint) {
  const MarketTrace tr = Tatonnement(StaticSequence(MSym()), StepSchedule::InverseSqrt(1.0), V2(1, 1), 20);
  for (const auto& step : tr) {
    EXPECT_EQ(step.prices, V2(1, 1));
    EXPECT_NEAR((step.allocation - Mat::Constant(2, 2, 0.5)).norm(), 0.0, 1e-15);
  }
}

TEST(Tatonnement, StaticAsymmetricMarketConverges) {
  const FisherMarket market = MA();
  const long T = 10000;
  const MarketTrace tr = Tatonnement(StaticSequence(market), StepSchedule::InverseSqrt(1.0), V2(5, 5), T);
  const MarketOutcome ce = SolveCe(market);
  EXPECT_LE(DistanceToCe(tr.back(), ce).value, 1e-2);
}

TEST(Tatonnement, FirstStepMatchesHandComputation) {
  // Demand at (5,5) is (0.1,0.1) and (0.3,0.1); excess supply (0.6, 0.8).
  const MarketTrace tr = Tatonnement(StaticSequence(MA()), StepSchedule::InverseSqrt(1.0), V2(5, 5), 1);
  EXPECT_NEAR(tr[0].allocation(1, 0), 0.3, 1e-15);
  EXPECT_NEAR(tr[0].prices[0], 4.4, 1e-14);
  EXPECT_NEAR(tr[0].prices[1], 4.2, 1e-14);
}

TEST(Tatonnement, ApproachesSolverEquilibriumOnStaticMarkets) {
  // Independent route to the equilibrium: long static tâtonnement should
  // close in on the barrier solver's prices.
  for (auto kind : {UtilityKind::kLinear, UtilityKind::kLeontief}) {
    const FisherMarket market(kind, (Mat(3, 3) << 2, 1, 1, 1, 3, 1, 1, 1, 2).finished(),
                              (Vec(3) << 1, 2, 1.5).finished(), (Vec(3) << 1, 1.5, 1).finished());
    const MarketOutcome ce = SolveCe(market);
    const MarketTrace tr = Tatonnement(StaticSequence(market), StepSchedule::InverseSqrt(0.5),
                                       ce.prices.array() + 1.0, 40000);
    Vec avg = Vec::Zero(3);
    for (std::size_t k = tr.size() / 2; k < tr.size(); ++k) avg += tr[k].prices;
    avg /= static_cast<double>(tr.size() - tr.size() / 2);
    EXPECT_LE((avg - ce.prices).norm(), 2e-2) << ToString(kind);
  }
}

TEST(Tatonnement, RejectsBadInputs) {
  EXPECT_THROW(Tatonnement(StaticSequence(MA()), StepSchedule::InverseSqrt(1), V2(-1, 1), 5), Error);
  EXPECT_THROW(Tatonnement(StaticSequence(MA()), StepSchedule::InverseSqrt(1), Vec::Ones(3), 5), Error);
  EXPECT_THROW(Tatonnement(StaticSequence(MA()), StepSchedule::InverseSqrt(1), V2(1, 1), 0), Error);
}

TEST(Myopic, EquilibriumIsStationary) {
  const MarketOutcome ce = SolveCe(MSym());
  const MarketTrace tr = MyopicBestResponse(StaticSequence(MSym()), StepSchedule::InverseSqrt(5),
                                            StepSchedule::InverseSqrt(0.01), ce.prices, ce.allocation, 50);
  for (const auto& step : tr) {
    EXPECT_NEAR((step.prices - ce.prices).norm(), 0.0, 1e-14);
    EXPECT_NEAR((step.allocation - ce.allocation).norm(), 0.0, 1e-14);
  }
}

TEST(Myopic, StaticAsymmetricMarketApproachesEquilibrium) {
  const FisherMarket market = MA();
  const MarketOutcome ce = SolveCe(market);
  const long T = 10000;
  // Buyers start at their demand for the opening prices.
  const MarketTrace tr = MyopicBestResponse(StaticSequence(market), StepSchedule::InverseSqrt(5),
                                            StepSchedule::InverseSqrt(0.01), V2(5, 5),
                                            MarketDemand(market, V2(5, 5)), T);
  const std::vector<double> d = DistanceSeries(tr, std::vector<MarketOutcome>(T, ce));
  EXPECT_LE(d.back(), 0.1);
  EXPECT_LT(Mean(d, T / 2, T), Mean(d, 1, 100));
}

TEST(Myopic, ZeroUtilityNamesBuyerAndStep) {
  const FisherMarket market(UtilityKind::kLinear, Mat::Ones(2, 2), V2(1, 1), V2(1, 1));
  Mat x0 = Mat::Constant(2, 2, 0.5);
  x0.row(1).setZero();
  try {
    MyopicBestResponse(StaticSequence(market), StepSchedule::Constant(0.1), StepSchedule::Constant(0.1),
                       V2(1, 1), x0, 3);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("step 1"), std::string::npos) << what;
    EXPECT_NE(what.find("buyer 1"), std::string::npos) << what;
  }
}

TEST(Myopic, BudgetProjectionKeepsSpendingWithinBudget) {
  const FisherMarket market = MA();
  MyopicOptions options;
  options.budget_projection = true;
  const MarketTrace tr = MyopicBestResponse(StaticSequence(market), StepSchedule::InverseSqrt(1),
                                            StepSchedule::InverseSqrt(0.5), V2(2, 2),
                                            EqualSplitAllocation(market), 200, options);
  Vec faced = V2(2, 2);
  for (const auto& step : tr) {
    for (int i = 0; i < 2; ++i) {
      EXPECT_LE(step.allocation.row(i).dot(faced), market.budgets()[i] + 1e-8);
    }
    faced = step.prices;
  }
}

TEST(Dynamics, DeterministicPerSeed) {
  const auto seq = OnlineSequence(UtilityKind::kCobbDouglas, 5, 8, MyopicRanges(), 4);
  const Vec p0 = Vec::Constant(8, 10.0);
  const MarketTrace a = Tatonnement(seq, StepSchedule::InverseSqrt(1), p0, 100);
  const MarketTrace b = Tatonnement(seq, StepSchedule::InverseSqrt(1), p0, 100);
  const MarketTrace c = MyopicBestResponse(seq, StepSchedule::InverseSqrt(5), StepSchedule::InverseSqrt(0.01),
                                           p0, EqualSplitAllocation(seq(1)), 100);
  const MarketTrace d = MyopicBestResponse(seq, StepSchedule::InverseSqrt(5), StepSchedule::InverseSqrt(0.01),
                                           p0, EqualSplitAllocation(seq(1)), 100);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].prices, b[k].prices);
    EXPECT_EQ(a[k].allocation, b[k].allocation);
    EXPECT_EQ(c[k].prices, d[k].prices);
    EXPECT_EQ(c[k].allocation, d[k].allocation);
  }
}

TEST(Dynamics, LeontiefMyopicTraceIsSmootherThanTatonnement) {
  // Small allocation steps keep the myopic distance series calmer than the
  // tâtonnement series on the same online Leontief markets.
  int smoother = 0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto seq = OnlineSequence(UtilityKind::kLeontief, 5, 8, MyopicRanges(), seed);
    const Vec p0 = Vec::Constant(8, 2.0);
    const long T = 200;
    const auto eq = EquilibriumSequence(seq, T);
    const auto dt = DistanceSeries(Tatonnement(seq, StepSchedule::InverseSqrt(1), p0, T), eq);
    const auto dm = DistanceSeries(
        MyopicBestResponse(seq, StepSchedule::InverseSqrt(5), StepSchedule::InverseSqrt(0.01), p0,
                           EqualSplitAllocation(seq(1)), T),
        eq);
    auto variance_of_steps = [](const std::vector<double>& d) {
      double sum = 0.0;
      for (std::size_t k = 1; k < d.size(); ++k) sum += (d[k] - d[k - 1]) * (d[k] - d[k - 1]);
      return sum / (d.size() - 1);
    };
    if (variance_of_steps(dm) / variance_of_steps(dt) < 1.0) ++smoother;
  }
  EXPECT_EQ(smoother, seeds);
}

TEST(Dynamics, DistanceSeriesNeedsEnoughEquilibria) {
  const MarketTrace tr(3, SolveCe(MA()));
  EXPECT_THROW(DistanceSeries(tr, std::vector<MarketOutcome>(2, SolveCe(MA()))), Error);
}

// Good 0 of these markets clears almost exactly at price zero, which left the
// barrier holding it at mu / excess instead of freeing it.
TEST(SolveCe, NearlyClearedFreeLeontiefGood) {
  for (auto [seed, t] : {std::pair<std::uint64_t, long>{22, 879}, {56, 57}}) {
    const FisherMarket market =
        OnlineSequence(UtilityKind::kLeontief, 5, 8, MyopicRanges(), seed)(t);
    const MarketOutcome ce = SolveCe(market);
    EXPECT_EQ(ce.prices[0], 0.0) << seed;
    EXPECT_TRUE(CeCheck(market, ce, 1e-9).pass) << seed;
  }
}

TEST(SampleInitialPrices, RangeAndDeterminism) {
  const Vec p = SampleInitialPrices(8, InitialPriceRange(), 3);
  ASSERT_EQ(p.size(), 8);
  EXPECT_GE(p.minCoeff(), 5.0);
  EXPECT_LE(p.maxCoeff(), 55.0);
  EXPECT_EQ(p, SampleInitialPrices(8, InitialPriceRange(), 3));
  EXPECT_NE(p, SampleInitialPrices(8, InitialPriceRange(), 4));
  EXPECT_THROW(SampleInitialPrices(0, InitialPriceRange(), 0), Error);
}

}  // namespace
}  // namespace stackelberg
