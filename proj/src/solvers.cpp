#include "stackelberg/solvers.hpp"

#include <algorithm>
#include <sstream>
#include <string>

namespace stackelberg {

namespace {

void RequireSteps(long steps) {
  if (steps < 1) throw Error(ErrorKind::kInvalidArgument, "number of steps must be positive");
}

void RequireStart(const FeasibleSet& set, const Vec& v, const char* name) {
  if (v.size() != set.dim()) {
    std::ostringstream os;
    os << name << " has dimension " << v.size() << ", expected " << set.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if (!set.Contains(v)) {
    std::ostringstream os;
    os << name << " lies outside its strategy set (violation " << set.Violation(v) << ")";
    throw Error(ErrorKind::kInfeasible, os.str());
  }
}

void RequireOracles(const Game& game) {
  if (!game.best_response_oracle) {
    throw Error(ErrorKind::kUnsupported, "solver needs a best-response oracle");
  }
  if (!game.kkt_oracle) throw Error(ErrorKind::kUnsupported, "solver needs a KKT oracle");
}

// Halfspaces {y : g_k(x, y0) + grad_y g_k(x, y0) (y - y0) >= 0}.
std::vector<Halfspace> LinearizedInnerSet(const Game& game, const Vec& x, const Vec& y0) {
  std::vector<Halfspace> out;
  if (game.num_constraints == 0) return out;
  const Vec g = game.constraints(x, y0);
  const Mat jac = game.grad_y_constraints(x, y0);
  out.reserve(game.num_constraints);
  for (int k = 0; k < game.num_constraints; ++k) {
    Vec row = jac.row(k).transpose();
    const double offset = g[k] - row.dot(y0);
    out.push_back({-row, offset});
  }
  return out;
}

Vec ProjectInner(const Game& game, const Vec& x, const Vec& y,
                 const AlternatingProjectionOptions& options) {
  const auto halfspaces = LinearizedInnerSet(game, x, y);
  if (halfspaces.empty()) return Project(game.set_y, y);
  return AlternatingProject(halfspaces, game.set_y, y, options);
}

}  // namespace

SolverResult MaxOracleMirrorDescent(const Game& game, Regularizer reg,
                                    const StepSchedule& schedule, long steps,
                                    const Vec& x0) {
  RequireOracles(game);
  RequireSteps(steps);
  RequireStart(game.set_x, x0, "x0");

  IterateTrace trace;
  Vec x = x0;
  Vec y = BestResponse(game, x);
  for (long t = 1; t <= steps; ++t) {
    const Vec lambda = KktMultipliers(game, x, y);
    const LagrangianValue lv = LagrangianEval(game, {x, y}, lambda);
    const double eta = schedule(t);
    x = MirrorStep(reg, game.set_x, x, lv.grad_x, eta);
    y = BestResponse(game, x);
    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = y;
    rec.objective = game.objective(x, y);
    rec.lagrangian = lv.value;
    rec.eta = eta;
    trace.Push(std::move(rec));
  }
  SolverResult result{{}, std::move(trace)};
  result.profile.x = result.trace.Average().x;
  result.profile.y = BestResponse(game, result.profile.x);
  return result;
}

SolverResult NestedMirrorDescentAscent(const Game& game,
                                       const StepSchedule& schedule_x,
                                       const StepSchedule& schedule_y,
                                       long steps, const Vec& x0, const Vec& y0,
                                       const NestedOptions& options) {
  if (!game.kkt_oracle) throw Error(ErrorKind::kUnsupported, "solver needs a KKT oracle");
  if (!game.grad_y_objective) {
    throw Error(ErrorKind::kUnsupported, "solver needs the objective's y-gradient");
  }
  if (options.inner_steps < 0) {
    throw Error(ErrorKind::kInvalidArgument, "inner step count must be nonnegative");
  }
  RequireSteps(steps);
  RequireStart(game.set_x, x0, "x0");
  RequireStart(game.set_y, y0, "y0");

  IterateTrace trace;
  Vec x = x0;
  Vec y = y0;
  for (long t = 1; t <= steps; ++t) {
    double inner_eta = schedule_y(1);
    for (long k = 1; k <= options.inner_steps; ++k) {
      inner_eta = schedule_y(k);
      const Vec grad = game.grad_y_objective(x, y);
      const Vec stepped = MirrorStep(options.reg_y, game.set_y, y, -grad, inner_eta);
      y = ProjectInner(game, x, stepped, options.projection);
    }
    // Gradient mapping of the inner problem at the approximate response.
    const Vec probe = ProjectInner(
        game, x, y + inner_eta * game.grad_y_objective(x, y), options.projection);
    const double inner_residual = (y - probe).norm() / inner_eta;

    const Vec lambda = KktMultipliers(game, x, y);
    const LagrangianValue lv = LagrangianEval(game, {x, y}, lambda);
    const double eta = schedule_x(t);
    x = MirrorStep(options.reg_x, game.set_x, x, lv.grad_x, eta);

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = y;
    rec.objective = game.objective(x, y);
    rec.lagrangian = lv.value;
    rec.eta = eta;
    rec.inner_residual = inner_residual;
    trace.Push(std::move(rec));
  }
  SolverResult result{{}, std::move(trace)};
  result.profile.x = result.trace.Average().x;
  result.profile.y = game.best_response_oracle ? BestResponse(game, result.profile.x) : y;
  return result;
}

IterateTrace LagrangianMirrorDescentAscent(const Game& game, const Vec& lambda_star,
                                           const StepSchedule& schedule_x,
                                           const StepSchedule& schedule_y,
                                           long steps, const Vec& x0, const Vec& y0,
                                           const LagrangianOptions& options) {
  if (lambda_star.size() != game.num_constraints) {
    throw Error(ErrorKind::kDimensionMismatch, "multiplier has the wrong dimension");
  }
  RequireSteps(steps);
  RequireStart(game.set_x, x0, "x0");
  RequireStart(game.set_y, y0, "y0");

  IterateTrace trace;
  Vec x = x0;
  Vec y = y0;
  const long window = std::min(steps, options.degeneracy_window);
  bool flat = window > 0;
  for (long t = 1; t <= steps; ++t) {
    const LagrangianValue lv = LagrangianEval(game, {x, y}, lambda_star);
    if (t <= window && lv.grad_y.norm() > options.degeneracy_tol) flat = false;
    const double eta_x = schedule_x(t);
    const double eta_y = schedule_y(t);
    Vec next_x = MirrorStep(options.reg, game.set_x, x, lv.grad_x, eta_x);
    Vec next_y = MirrorStep(options.reg, game.set_y, y, -lv.grad_y, eta_y);
    x = std::move(next_x);
    y = std::move(next_y);

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = y;
    rec.objective = game.objective(x, y);
    rec.lagrangian = lv.value;
    rec.eta = eta_x;
    trace.Push(std::move(rec));
  }
  trace.degenerate = flat;
  if (options.certify_feasible) {
    const StrategyProfile avg = trace.Average();
    trace.certified_y = ProjectInner(game, avg.x, avg.y, options.projection);
  }
  return trace;
}

IterateTrace VanillaGradientDescentAscent(const Game& game,
                                          const StepSchedule& schedule_x,
                                          const StepSchedule& schedule_y,
                                          long steps, const Vec& x0, const Vec& y0) {
  RequireSteps(steps);
  RequireStart(game.set_x, x0, "x0");
  RequireStart(game.set_y, y0, "y0");

  IterateTrace trace;
  Vec x = x0;
  Vec y = y0;
  for (long t = 1; t <= steps; ++t) {
    const Vec gx = game.grad_x_objective(x, y);
    const Vec gy = game.grad_y_objective(x, y);
    const double eta_x = schedule_x(t);
    const double lagr = game.objective(x, y);
    x = Project(game.set_x, x - eta_x * gx);
    y = Project(game.set_y, y + schedule_y(t) * gy);

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = y;
    rec.objective = game.objective(x, y);
    rec.lagrangian = lagr;
    rec.eta = eta_x;
    trace.Push(std::move(rec));
  }
  return trace;
}

IterateTrace ProjectedOgdOnline(const OnlineGradient& gradient,
                                const FeasibleSet& set,
                                const StepSchedule& schedule, long steps,
                                const Vec& x0) {
  return OnlineMirrorDescent(gradient, Regularizer::kEuclidean, set, schedule, steps, x0);
}

IterateTrace OnlineMirrorDescent(const OnlineGradient& gradient, Regularizer reg,
                                 const FeasibleSet& set,
                                 const StepSchedule& schedule, long steps,
                                 const Vec& x0) {
  RequireSteps(steps);
  RequireStart(set, x0, "x0");
  IterateTrace trace;
  Vec x = x0;
  for (long t = 1; t <= steps; ++t) {
    const Vec g = gradient(t, x);
    if (g.size() != x.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "online gradient has the wrong dimension");
    }
    const double eta = schedule(t);
    x = MirrorStep(reg, set, x, g, eta);
    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.y = Vec();
    rec.eta = eta;
    trace.Push(std::move(rec));
  }
  return trace;
}

}  // namespace stackelberg
