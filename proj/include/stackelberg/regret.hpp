#pragma once

#include <functional>
#include <span>

#include "stackelberg/game.hpp"
#include "stackelberg/trace.hpp"

namespace stackelberg {

using LossFn = std::function<double(const Vec&)>;

// Returns the best fixed action for the average loss it is handed: a
// minimizer for the outer player, a maximizer for the inner one. Closed-form
// comparators ignore the argument's values and evaluate it at a known point.
using Comparator = std::function<Vec(const LossFn& average_loss)>;

// Always answers `point`.
Comparator FixedComparator(Vec point);

// Dense grid search over a box of dimension <= 2 at the given resolution.
Comparator GridArgmin(const FeasibleSet& box, double resolution = 1e-3);
Comparator GridArgmax(const FeasibleSet& box, double resolution = 1e-3);

enum class RegretKind { kVanillaX, kVanillaY, kAsymmetric, kLagrangianX, kLagrangianY, kOnline };

const char* ToString(RegretKind kind);

// Average-regret accounting for one player over one trace.
struct RegretLedger {
  RegretKind kind = RegretKind::kAsymmetric;
  long steps = 0;
  double realized = 0.0;    // (1/T) sum of realized losses (payoffs for y-sides)
  double comparator = 0.0;  // (1/T) sum of losses of the best fixed action
  Vec best_action;

  // Outer-side kinds: realized - comparator; inner-side: comparator - realized.
  double Regret() const;
};

// (1/T) sum_t V(x_t) - min_x V(x).
RegretLedger AsymmetricRegret(const IterateTrace& trace, const Game& game,
                              const Comparator& comparator);

enum class Side { kX, kY };

// x side: (1/T) sum L(x_t, y_t) - min_x (1/T) sum L(x, y_t);
// y side: max_y (1/T) sum L(x_t, y) - (1/T) sum L(x_t, y_t).
RegretLedger LagrangianRegret(const IterateTrace& trace, const Game& game,
                              const Vec& lambda_star, Side side,
                              const Comparator& comparator);

// Same with f in place of L.
RegretLedger VanillaRegret(const IterateTrace& trace, const Game& game, Side side,
                           const Comparator& comparator);

// Average regret of an online learner against losses loss(t, x), t = 1..T.
// The point played in round t is the iterate before the t-th update: x0 for
// t = 1 and record t-1 afterwards.
using OnlineLoss = std::function<double(long t, const Vec& x)>;
RegretLedger OnlineRegret(const IterateTrace& trace, const Vec& x0,
                          const OnlineLoss& loss, const Comparator& comparator);

}  // namespace stackelberg
