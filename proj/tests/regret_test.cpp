#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "stackelberg/mirror.hpp"
#include "stackelberg/rng.hpp"
#include "stackelberg/test_games.hpp"

namespace stackelberg {
namespace {

using Factory = std::function<BundledLosses(long, std::uint64_t)>;

const Factory kFactories[] = {MakeBoxLinearLosses, MakeBoxQuadraticLosses,
                              MakeSimplexLinearLosses};

double TotalLoss(const BundledLosses& seq, const Vec& x) {
  double s = 0.0;
  for (long t = 1; t <= seq.horizon; ++t) s += seq.loss(t, x);
  return s;
}

TEST(BundledLosses, BestActionBeatsRandomFeasiblePoints) {
  for (const Factory& make : kFactories) {
    const BundledLosses seq = make(300, 4);
    ASSERT_TRUE(seq.set.Contains(seq.best_action)) << seq.name;
    const double best = TotalLoss(seq, seq.best_action);
    Rng rng(99);
    for (int k = 0; k < 200; ++k) {
      Vec x(seq.x0.size());
      for (int j = 0; j < x.size(); ++j) x[j] = rng.Uniform(-1.0, 1.0);
      x = Project(seq.set, x);
      EXPECT_GE(TotalLoss(seq, x), best - 1e-9) << seq.name;
    }
  }
}

TEST(BundledLosses, GradientsRespectLipschitzBound) {
  for (const Factory& make : kFactories) {
    const BundledLosses seq = make(500, 8);
    const bool simplex = seq.reg == Regularizer::kNegativeEntropy;
    Rng rng(3);
    for (long t = 1; t <= seq.horizon; ++t) {
      Vec x(seq.x0.size());
      for (int j = 0; j < x.size(); ++j) x[j] = rng.Uniform(-1.0, 1.0);
      x = Project(seq.set, x);
      const Vec g = seq.gradient(t, x);
      const double norm = simplex ? g.cwiseAbs().maxCoeff() : g.norm();
      ASSERT_LE(norm, seq.lipschitz + 1e-12) << seq.name;
    }
  }
}

TEST(BundledLosses, GradientsMatchFiniteDifferences) {
  for (const Factory& make : kFactories) {
    const BundledLosses seq = make(20, 5);
    const Vec x = Project(seq.set, Vec::Constant(seq.x0.size(), 0.1));
    for (long t : {1L, 7L, 20L}) {
      const Vec g = seq.gradient(t, x);
      for (int j = 0; j < x.size(); ++j) {
        Vec e = Vec::Zero(x.size());
        e[j] = 1e-6;
        const double fd = (seq.loss(t, x + e) - seq.loss(t, x - e)) / 2e-6;
        EXPECT_NEAR(fd, g[j], 1e-4) << seq.name;
      }
    }
  }
}

TEST(BundledLosses, OmdAverageRegretWithinBound) {
  for (const Factory& make : kFactories) {
    for (long T : {100L, 1000L, 10000L}) {
      const BundledLosses seq = make(T, 1);
      const IterateTrace trace =
          OnlineMirrorDescent(seq.gradient, seq.reg, seq.set,
                              StepSchedule::FixedHorizon(seq.c, seq.lipschitz, T), T, seq.x0);
      const RegretLedger ledger =
          OnlineRegret(trace, seq.x0, seq.loss, FixedComparator(seq.best_action));
      EXPECT_LE(ledger.Regret(), OmdRegretBound(seq.c, seq.lipschitz, T))
          << seq.name << " T=" << T;
      EXPECT_GE(ledger.Regret(), -1e-12) << seq.name << " T=" << T;
    }
  }
}

TEST(BundledLosses, DeterministicAndRejectsEmptyHorizon) {
  const BundledLosses a = MakeBoxLinearLosses(10, 2);
  const BundledLosses b = MakeBoxLinearLosses(10, 2);
  EXPECT_EQ(a.gradient(4, a.x0), b.gradient(4, b.x0));
  EXPECT_THROW(MakeSimplexLinearLosses(0, 1), Error);
  EXPECT_DOUBLE_EQ(OmdRegretBound(2.0, 1.0, 200), 0.2);
}

}  // namespace
}  // namespace stackelberg
