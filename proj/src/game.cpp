#include "stackelberg/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stackelberg {

const char* ToString(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "dimension mismatch";
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kUnsupported: return "unsupported operation";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kConfig: return "config error";
  }
  return "unknown";
}

FeasibleSet FeasibleSet::Box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw Error(ErrorKind::kDimensionMismatch,
                "box bounds must be non-empty and of equal length");
  }
  if ((lower.array() > upper.array()).any()) {
    throw Error(ErrorKind::kInvalidArgument, "box requires lower <= upper");
  }
  FeasibleSet set(Kind::kBox, static_cast<int>(lower.size()));
  set.lower_ = std::move(lower);
  set.upper_ = std::move(upper);
  return set;
}

FeasibleSet FeasibleSet::UniformBox(int dim, double lower, double upper) {
  return Box(Vec::Constant(dim, lower), Vec::Constant(dim, upper));
}

FeasibleSet FeasibleSet::NonnegativeOrthant(int dim) {
  if (dim <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "dimension must be positive");
  }
  return FeasibleSet(Kind::kNonnegativeOrthant, dim);
}

FeasibleSet FeasibleSet::ScaledSimplex(int dim, double mass) {
  if (dim <= 0) {
    throw Error(ErrorKind::kInvalidArgument, "dimension must be positive");
  }
  if (!(mass > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "simplex mass must be positive");
  }
  FeasibleSet set(Kind::kScaledSimplex, dim);
  set.mass_ = mass;
  return set;
}

double FeasibleSet::Violation(const Vec& x) const {
  if (x.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch, "point dimension does not match set");
  }
  double v = 0.0;
  switch (kind_) {
    case Kind::kBox:
      for (int i = 0; i < dim_; ++i) {
        v = std::max({v, lower_[i] - x[i], x[i] - upper_[i]});
      }
      break;
    case Kind::kNonnegativeOrthant:
      v = std::max(0.0, -x.minCoeff());
      break;
    case Kind::kScaledSimplex:
      v = std::max({0.0, -x.minCoeff(), std::abs(x.sum() - mass_)});
      break;
  }
  return v;
}

bool FeasibleSet::Contains(const Vec& x, double tol) const {
  return Violation(x) <= tol;
}

double FeasibleSet::MaxNorm() const {
  switch (kind_) {
    case Kind::kBox:
      return lower_.cwiseAbs().cwiseMax(upper_.cwiseAbs()).norm();
    case Kind::kNonnegativeOrthant:
      return std::numeric_limits<double>::infinity();
    case Kind::kScaledSimplex:
      return mass_;
  }
  return 0.0;
}

double ClampTiny(double value, double tol) {
  return (value < 0.0 && value >= -tol) ? 0.0 : value;
}

void CheckDimensions(const Game& game, const StrategyProfile& p) {
  if (p.x.size() != game.set_x.dim() || p.y.size() != game.set_y.dim()) {
    std::ostringstream os;
    os << "profile dimensions (" << p.x.size() << ", " << p.y.size()
       << ") do not match game (" << game.set_x.dim() << ", "
       << game.set_y.dim() << ")";
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
}

double ObjectiveEval(const Game& game, const StrategyProfile& p) {
  CheckDimensions(game, p);
  return game.objective(p.x, p.y);
}

LagrangianValue LagrangianEval(const Game& game, const StrategyProfile& p,
                               const Vec& lambda) {
  CheckDimensions(game, p);
  if (lambda.size() != game.num_constraints) {
    throw Error(ErrorKind::kDimensionMismatch,
                "multiplier length does not match the number of constraints");
  }
  if (lambda.size() > 0 && lambda.minCoeff() < 0.0) {
    throw Error(ErrorKind::kInvalidArgument, "multipliers must be nonnegative");
  }
  LagrangianValue out;
  out.value = game.objective(p.x, p.y);
  out.grad_x = game.grad_x_objective(p.x, p.y);
  out.grad_y = game.grad_y_objective(p.x, p.y);
  if (game.num_constraints > 0) {
    out.value += lambda.dot(game.constraints(p.x, p.y));
    out.grad_x += game.grad_x_constraints(p.x, p.y).transpose() * lambda;
    out.grad_y += game.grad_y_constraints(p.x, p.y).transpose() * lambda;
  }
  return out;
}

Vec BestResponse(const Game& game, const Vec& x) {
  if (!game.best_response_oracle) {
    throw Error(ErrorKind::kUnsupported, "game has no best-response oracle");
  }
  if (x.size() != game.set_x.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "x dimension does not match game");
  }
  Vec y = game.best_response_oracle(x);
  if (game.num_constraints > 0) {
    const double slack = game.constraints(x, y).minCoeff();
    if (slack < -1e-7 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
      throw Error(ErrorKind::kInfeasible,
                  "best-response oracle returned an infeasible point");
    }
  }
  return y;
}

double ValueFunction(const Game& game, const Vec& x) {
  const Vec y = BestResponse(game, x);
  return game.objective(x, y);
}

Vec KktMultipliers(const Game& game, const Vec& x, const Vec& y) {
  if (!game.kkt_oracle) {
    throw Error(ErrorKind::kUnsupported, "game has no KKT multiplier oracle");
  }
  CheckDimensions(game, {x, y});
  Vec lambda = game.kkt_oracle(x, y);
  if (lambda.size() != game.num_constraints) {
    throw Error(ErrorKind::kDimensionMismatch,
                "KKT oracle returned the wrong number of multipliers");
  }
  if (lambda.size() > 0 && lambda.minCoeff() < 0.0) {
    throw Error(ErrorKind::kDomain, "KKT oracle returned a negative multiplier");
  }
  return lambda;
}

FeasibilityReport FeasibilityCheck(const Game& game, const StrategyProfile& p,
                                   double tol) {
  CheckDimensions(game, p);
  FeasibilityReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  if (game.num_constraints > 0) {
    report.min_slack = game.constraints(p.x, p.y).minCoeff();
  }
  report.worst_violation = std::max({0.0, -report.min_slack,
                                     game.set_x.Violation(p.x),
                                     game.set_y.Violation(p.y)});
  report.feasible = report.worst_violation <= tol;
  return report;
}

Residuals StackelbergResidual(const Game& game, const StrategyProfile& p,
                              std::optional<double> v_star, double tol) {
  const FeasibilityReport feas = FeasibilityCheck(game, p, tol);
  if (!feas.feasible) {
    std::ostringstream os;
    os << "profile is infeasible (violation " << feas.worst_violation << ")";
    throw Error(ErrorKind::kInfeasible, os.str());
  }
  const double v = ValueFunction(game, p.x);
  Residuals r;
  r.inner_delta = ClampTiny(v - game.objective(p.x, p.y), tol);
  if (v_star) r.outer_eps = ClampTiny(v - *v_star, tol);
  return r;
}

double SaddleResidual(const Game& game, const StrategyProfile& p,
                      const Vec& lambda_star, const SaddleOracles& oracles,
                      double tol) {
  CheckDimensions(game, p);
  if (!oracles.max_over_y || !oracles.min_over_x) {
    throw Error(ErrorKind::kUnsupported, "saddle residual needs both comparator oracles");
  }
  if (lambda_star.size() != game.num_constraints) {
    throw Error(ErrorKind::kDimensionMismatch,
                "multiplier length does not match the number of constraints");
  }
  const double upper = oracles.max_over_y(p.x, lambda_star);
  const double lower = oracles.min_over_x(p.y, lambda_star);
  return ClampTiny(upper - lower, tol);
}

}  // namespace stackelberg
