#pragma once

#include <functional>
#include <vector>

#include "stackelberg/game.hpp"
#include "stackelberg/mirror.hpp"
#include "stackelberg/trace.hpp"

namespace stackelberg {

struct SolverResult {
  StrategyProfile profile;
  IterateTrace trace;
};

// Outer player runs mirror descent on grad_x L(x, BR(x), lambda*(x, BR(x)));
// the inner player best responds exactly. Returns (x_bar_T, BR(x_bar_T)).
//
// Record t holds (x_t, BR(x_t)) with objective V(x_t); its lagrangian field
// is L at the point the step to x_t was taken from.
SolverResult MaxOracleMirrorDescent(const Game& game, Regularizer reg,
                                    const StepSchedule& schedule, long steps,
                                    const Vec& x0);

struct NestedOptions {
  Regularizer reg_x = Regularizer::kEuclidean;
  Regularizer reg_y = Regularizer::kEuclidean;
  long inner_steps = 1;
  AlternatingProjectionOptions projection;
};

// Like MaxOracleMirrorDescent but the inner player approximates its best
// response with `inner_steps` projected mirror-ascent steps on f(x, .) over
// {y in Y : g(x, y) >= 0}, warm-started from its previous iterate. The inner
// feasible set is handled by alternating projection onto Y and the
// constraints linearized in y (exact for constraints affine in y).
// inner_steps = 0 freezes the inner player at y0.
//
// Multipliers come from the game's KKT oracle at the approximate response.
// Each record's inner_residual is the gradient-mapping norm of the inner
// problem after the inner loop.
SolverResult NestedMirrorDescentAscent(const Game& game,
                                       const StepSchedule& schedule_x,
                                       const StepSchedule& schedule_y,
                                       long steps, const Vec& x0, const Vec& y0,
                                       const NestedOptions& options = {});

struct LagrangianOptions {
  Regularizer reg = Regularizer::kEuclidean;
  // Also project the average inner iterate onto {y : g(x_bar, y) >= 0}.
  bool certify_feasible = false;
  // Degeneracy is flagged when ||grad_y L|| <= degeneracy_tol on each of the
  // first min(T, degeneracy_window) steps.
  long degeneracy_window = 100;
  double degeneracy_tol = 1e-12;
  AlternatingProjectionOptions projection;
};

// Simultaneous mirror descent (x) / ascent (y) on L(x, y, lambda*), both
// proximal steps anchored at the previous iterates. The euclidean
// regularizer gives Lagrangian gradient descent ascent.
IterateTrace LagrangianMirrorDescentAscent(const Game& game, const Vec& lambda_star,
                                           const StepSchedule& schedule_x,
                                           const StepSchedule& schedule_y,
                                           long steps, const Vec& x0, const Vec& y0,
                                           const LagrangianOptions& options = {});

// Both players run projected OGD on f itself, ignoring g: x on f(., y_t) and
// y on -f(x_t, .), simultaneously.
IterateTrace VanillaGradientDescentAscent(const Game& game,
                                          const StepSchedule& schedule_x,
                                          const StepSchedule& schedule_y,
                                          long steps, const Vec& x0, const Vec& y0);

// Gradient of the t-th loss (1-based) at x.
using OnlineGradient = std::function<Vec(long t, const Vec& x)>;

// x_{t} = Project(set, x_{t-1} - eta_t grad loss_t(x_{t-1})) for t = 1..T.
// Record t holds x_t; y is empty.
IterateTrace ProjectedOgdOnline(const OnlineGradient& gradient,
                                const FeasibleSet& set,
                                const StepSchedule& schedule, long steps,
                                const Vec& x0);

// Same recursion with an arbitrary regularizer.
IterateTrace OnlineMirrorDescent(const OnlineGradient& gradient, Regularizer reg,
                                 const FeasibleSet& set,
                                 const StepSchedule& schedule, long steps,
                                 const Vec& x0);

}  // namespace stackelberg
