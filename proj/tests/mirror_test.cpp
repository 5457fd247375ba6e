#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "stackelberg/mirror.hpp"

namespace stackelberg {
namespace {

Vec V2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TEST(StepSchedule, Values) {
  EXPECT_DOUBLE_EQ(StepSchedule::Constant(0.3)(7), 0.3);
  EXPECT_DOUBLE_EQ(StepSchedule::FixedHorizon(1.0, 3.0, 50)(1), 1.0 / 30.0);
  EXPECT_DOUBLE_EQ(StepSchedule::InverseSqrt(5.0)(4), 2.5);
  EXPECT_THROW(StepSchedule::Constant(0.0), Error);
  EXPECT_THROW(StepSchedule::FixedHorizon(1.0, 3.0, 0), Error);
  EXPECT_THROW(StepSchedule::Constant(1.0)(0), Error);
}

TEST(Bregman, Examples) {
  EXPECT_DOUBLE_EQ(Bregman(Regularizer::kEuclidean, V2(1, 0), V2(0, 0)), 0.5);
  EXPECT_DOUBLE_EQ(Bregman(Regularizer::kEuclidean, V2(0.3, 0.2), V2(0.3, 0.2)), 0.0);
  EXPECT_DOUBLE_EQ(Bregman(Regularizer::kNegativeEntropy, V2(0.3, 0.7), V2(0.3, 0.7)), 0.0);
  EXPECT_NEAR(Bregman(Regularizer::kNegativeEntropy, V2(1, 0), V2(0.5, 0.5)), std::log(2.0),
              1e-15);
}

TEST(Bregman, EntropyDomainErrors) {
  try {
    Bregman(Regularizer::kNegativeEntropy, V2(0.5, 0.5), V2(1.0, 0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDomain);
  }
  EXPECT_THROW(Bregman(Regularizer::kNegativeEntropy, V2(-0.1, 0.5), V2(0.5, 0.5)), Error);
}

TEST(MirrorStep, Examples) {
  const auto box = FeasibleSet::UniformBox(1, -1.0, 1.0);
  EXPECT_DOUBLE_EQ(MirrorStep(Regularizer::kEuclidean, box, Vec::Constant(1, 0.8),
                              Vec::Constant(1, 2.0), 0.5)[0],
                   -0.2);
  const auto simplex = FeasibleSet::ScaledSimplex(2, 1.0);
  const Vec next = MirrorStep(Regularizer::kNegativeEntropy, simplex, V2(0.5, 0.5),
                              V2(0.0, std::log(4.0)), 1.0);
  EXPECT_NEAR(next[0], 0.8, 1e-15);
  EXPECT_NEAR(next[1], 0.2, 1e-15);
  for (auto reg : {Regularizer::kEuclidean, Regularizer::kNegativeEntropy}) {
    const Vec same = MirrorStep(reg, simplex, V2(0.25, 0.75), V2(0, 0), 0.7);
    EXPECT_NEAR(same[0], 0.25, 1e-15);
    EXPECT_NEAR(same[1], 0.75, 1e-15);
  }
}

TEST(MirrorStep, EntropyMinimizesProximalObjective) {
  // Compare the closed form with a grid over the 2-simplex.
  const auto simplex = FeasibleSet::ScaledSimplex(2, 1.0);
  const Vec x = V2(0.3, 0.7), g = V2(1.3, -0.4);
  const double eta = 0.6;
  const Vec next = MirrorStep(Regularizer::kNegativeEntropy, simplex, x, g, eta);
  double best = 1e300, best_a = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const double a = i * 1e-5;
    const Vec w = V2(a, 1.0 - a);
    const double obj = g.dot(w) + Bregman(Regularizer::kNegativeEntropy, w, x) / eta;
    if (obj < best) {
      best = obj;
      best_a = a;
    }
  }
  EXPECT_NEAR(next[0], best_a, 2e-5);
}

TEST(MirrorStep, RejectsNonpositiveStep) {
  const auto box = FeasibleSet::UniformBox(1, -1.0, 1.0);
  EXPECT_THROW(MirrorStep(Regularizer::kEuclidean, box, Vec::Zero(1), Vec::Zero(1), 0.0),
               Error);
}

TEST(Project, Examples) {
  const Vec b = Project(FeasibleSet::UniformBox(2, -1, 1), V2(2, -3));
  EXPECT_EQ(b, V2(1, -1));
  EXPECT_EQ(Project(FeasibleSet::NonnegativeOrthant(2), V2(-1, 2)), V2(0, 2));
  const Vec s = Project(FeasibleSet::ScaledSimplex(2, 1.0), V2(2, 0));
  EXPECT_EQ(s, V2(1, 0));
}

TEST(AlternatingProject, Examples) {
  std::vector<Halfspace> hs{{V2(1, 1), 1.0}};
  const Vec interior = V2(0.2, 0.3);
  EXPECT_EQ(AlternatingProject(hs, true, interior), interior);
  EXPECT_EQ(AlternatingProject(hs, true, V2(-1, -1)), V2(0, 0));

  // Oracle: the two-set scheme started at (2, 0) halves the excess each
  // sweep and settles at (1, 0).
  AlternatingProjectionOptions opts;
  const Vec z = AlternatingProject(hs, true, V2(2, 0), opts);
  EXPECT_LE(z.sum(), 1.0 + opts.tol);
  EXPECT_GE(z.minCoeff(), -opts.tol);
  EXPECT_NEAR(z[0], 1.0, 1e-7);
  EXPECT_NEAR(z[1], 0.0, 1e-7);
}

TEST(AlternatingProject, NonConvergenceCarriesViolation) {
  // Empty intersection: x <= -1 inside the orthant.
  std::vector<Halfspace> hs{{V2(1, 0), -1.0}};
  AlternatingProjectionOptions opts;
  opts.max_iter = 20;
  try {
    AlternatingProject(hs, true, V2(3, 3), opts);
    FAIL();
  } catch (const NonConvergenceError& e) {
    EXPECT_NEAR(e.residual(), 1.0, 1e-12);
    EXPECT_EQ(e.kind(), ErrorKind::kNonConvergence);
  }
}

class MirrorProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240611};
  std::normal_distribution<double> normal{0.0, 2.0};
  std::uniform_int_distribution<int> dim_dist{1, 6};

  Vec RandomVec(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
  }

  std::vector<FeasibleSet> Sets(int n) {
    return {FeasibleSet::UniformBox(n, -1.0, 0.5), FeasibleSet::NonnegativeOrthant(n),
            FeasibleSet::ScaledSimplex(n, 1.5)};
  }
};

TEST_F(MirrorProperties, ProjectionInvariants) {
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim_dist(rng);
    const Vec a = RandomVec(n), b = RandomVec(n);
    for (const auto& set : Sets(n)) {
      const Vec pa = Project(set, a), pb = Project(set, b);
      ASSERT_TRUE(set.Contains(pa, 1e-12));
      const Vec ppa = Project(set, pa);
      ASSERT_LE((ppa - pa).norm(), 1e-12);
      ASSERT_LE((pa - pb).norm(), (a - b).norm() + 1e-12);
      // Variational inequality: <a - P(a), z - P(a)> <= 0 for members z.
      ASSERT_LE((a - pa).dot(pb - pa), 1e-10);
    }
  }
}

TEST_F(MirrorProperties, BregmanNonnegativity) {
  std::uniform_real_distribution<double> pos(1e-6, 3.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim_dist(rng);
    const Vec w = RandomVec(n), u = RandomVec(n);
    const double e = Bregman(Regularizer::kEuclidean, w, u);
    ASSERT_GE(e, 0.0);
    ASSERT_NEAR(e, 0.5 * (w - u).squaredNorm(), 1e-12 * (1 + e));
    Vec pw(n), pu(n);
    for (int i = 0; i < n; ++i) {
      pw[i] = pos(rng);
      pu[i] = pos(rng);
    }
    ASSERT_GE(Bregman(Regularizer::kNegativeEntropy, pw, pu), 0.0);
    ASSERT_EQ(Bregman(Regularizer::kNegativeEntropy, pw, pw), 0.0);
    ASSERT_GT(Bregman(Regularizer::kNegativeEntropy, pw, pu), 0.0);
  }
}

TEST_F(MirrorProperties, EuclideanStepIsProjectedGradientBitForBit) {
  std::uniform_real_distribution<double> eta_dist(1e-3, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim_dist(rng);
    for (const auto& set : Sets(n)) {
      const Vec x = Project(set, RandomVec(n));
      const Vec g = RandomVec(n);
      const double eta = eta_dist(rng);
      const Vec a = MirrorStep(Regularizer::kEuclidean, set, x, g, eta);
      const Vec b = Project(set, x - eta * g);
      ASSERT_TRUE((a.array() == b.array()).all());
    }
  }
}

TEST_F(MirrorProperties, EntropyStepStaysInSet) {
  std::uniform_real_distribution<double> eta_dist(1e-3, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim_dist(rng);
    const auto simplex = FeasibleSet::ScaledSimplex(n, 1.5);
    Vec x = Project(simplex, RandomVec(n)).cwiseMax(1e-3);
    x *= 1.5 / x.sum();
    const Vec next =
        MirrorStep(Regularizer::kNegativeEntropy, simplex, x, RandomVec(n), eta_dist(rng));
    ASSERT_TRUE(simplex.Contains(next, 1e-12));
    ASSERT_GT(next.minCoeff(), 0.0);
  }
}

TEST_F(MirrorProperties, AlternatingProjectionRespectsTolerance) {
  AlternatingProjectionOptions opts;
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  int converged_pairs = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim_dist(rng);
    std::vector<Halfspace> hs;
    for (int k = 0; k < 2; ++k) {
      Vec p(n);
      for (int i = 0; i < n; ++i) p[i] = pos(rng);
      hs.push_back({p, pos(rng)});
    }
    // A single budget-type halfspace with the orthant always converges.
    const Vec start = RandomVec(n);
    const Vec z = AlternatingProject(std::span(hs).first(1), true, start, opts);
    ASSERT_LE(HalfspaceViolation(std::span(hs).first(1), z), opts.tol);
    ASSERT_GE(z.minCoeff(), 0.0);
    // Two halfspaces can meet at a sharp angle; whenever the scheme reports
    // success the tolerance must hold.
    try {
      const Vec z2 = AlternatingProject(hs, true, start, opts);
      ASSERT_LE(HalfspaceViolation(hs, z2), opts.tol);
      ASSERT_GE(z2.minCoeff(), 0.0);
      ++converged_pairs;
    } catch (const NonConvergenceError& e) {
      ASSERT_GT(e.residual(), opts.tol);
    }
  }
  EXPECT_GT(converged_pairs, 900);
}

}  // namespace
}  // namespace stackelberg
