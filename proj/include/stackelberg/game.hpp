#pragma once

#include <functional>
#include <optional>

#include "stackelberg/error.hpp"

namespace stackelberg {

inline constexpr double kDefaultFeasibilityTol = 1e-9;

// A convex strategy set with a cheap Euclidean projection.
class FeasibleSet {
 public:
  enum class Kind { kBox, kNonnegativeOrthant, kScaledSimplex };

  static FeasibleSet Box(Vec lower, Vec upper);
  static FeasibleSet UniformBox(int dim, double lower, double upper);
  static FeasibleSet NonnegativeOrthant(int dim);
  static FeasibleSet ScaledSimplex(int dim, double mass);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }
  double mass() const { return mass_; }

  bool Contains(const Vec& x, double tol = kDefaultFeasibilityTol) const;
  // Largest amount by which x leaves the set (0 for members).
  double Violation(const Vec& x) const;
  // max ||x|| over the set; infinite for the orthant.
  double MaxNorm() const;

 private:
  FeasibleSet(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  Vec lower_;
  Vec upper_;
  double mass_ = 0.0;
};

struct StrategyProfile {
  Vec x;
  Vec y;
};

// min_{x in X} max_{y in Y : g(x, y) >= 0} f(x, y).
//
// Constraint convention: g(x, y) >= 0 is feasible. Constraint gradients are
// returned as K x dim matrices, one row per constraint. All callbacks must be
// pure so that a Game can be shared across threads.
struct Game {
  using ScalarFn = std::function<double(const Vec&, const Vec&)>;
  using VectorFn = std::function<Vec(const Vec&, const Vec&)>;
  using JacobianFn = std::function<Mat(const Vec&, const Vec&)>;
  using BestResponseFn = std::function<Vec(const Vec&)>;

  FeasibleSet set_x = FeasibleSet::NonnegativeOrthant(1);
  FeasibleSet set_y = FeasibleSet::NonnegativeOrthant(1);
  int num_constraints = 0;

  ScalarFn objective;
  VectorFn grad_x_objective;
  VectorFn grad_y_objective;
  VectorFn constraints;
  JacobianFn grad_x_constraints;
  JacobianFn grad_y_constraints;

  // Optional oracles; an empty std::function means "not available".
  BestResponseFn best_response_oracle;
  VectorFn kkt_oracle;
  std::optional<Vec> global_multiplier;
};

struct Residuals {
  std::optional<double> outer_eps;  // empty when no optimal value was given
  double inner_delta = 0.0;
};

struct LagrangianValue {
  double value = 0.0;
  Vec grad_x;
  Vec grad_y;
};

struct FeasibilityReport {
  bool feasible = false;
  // max(0, -min_k g_k, set violations); 0 for feasible profiles.
  double worst_violation = 0.0;
  // min_k g_k (infinite when K = 0).
  double min_slack = 0.0;
};

// Saddle comparators, supplied by the caller: max_y L(x, y, lambda) and
// min_x L(x, y, lambda).
struct SaddleOracles {
  std::function<double(const Vec& x, const Vec& lambda)> max_over_y;
  std::function<double(const Vec& y, const Vec& lambda)> min_over_x;
};

double ObjectiveEval(const Game& game, const StrategyProfile& p);

LagrangianValue LagrangianEval(const Game& game, const StrategyProfile& p,
                               const Vec& lambda);

Vec BestResponse(const Game& game, const Vec& x);

// V(x) = f(x, y*(x)).
double ValueFunction(const Game& game, const Vec& x);

Vec KktMultipliers(const Game& game, const Vec& x, const Vec& y);

Residuals StackelbergResidual(const Game& game, const StrategyProfile& p,
                              std::optional<double> v_star,
                              double tol = kDefaultFeasibilityTol);

double SaddleResidual(const Game& game, const StrategyProfile& p,
                      const Vec& lambda_star, const SaddleOracles& oracles,
                      double tol = kDefaultFeasibilityTol);

FeasibilityReport FeasibilityCheck(const Game& game, const StrategyProfile& p,
                                   double tol = kDefaultFeasibilityTol);

// Throws kDimensionMismatch unless p matches the game's sets.
void CheckDimensions(const Game& game, const StrategyProfile& p);

// Residual values in [-tol, 0) are reported as 0.
double ClampTiny(double value, double tol);

}  // namespace stackelberg
