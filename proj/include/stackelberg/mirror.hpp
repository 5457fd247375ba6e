#pragma once

#include <span>

#include "stackelberg/game.hpp"

namespace stackelberg {

// Strongly convex mirror maps. Both have modulus 1 under their natural norms
// (l2 for euclidean, l1 on the simplex for negative entropy).
enum class Regularizer { kEuclidean, kNegativeEntropy };

inline constexpr double kEntropyFloor = 1e-12;

// Learning-rate rule evaluated at 1-based step t.
class StepSchedule {
 public:
  enum class Kind { kConstant, kFixedHorizon, kInverseSqrt };

  static StepSchedule Constant(double eta);
  // eta = c / (L sqrt(2 T)) at every step.
  static StepSchedule FixedHorizon(double c, double lipschitz, long horizon);
  // eta_t = a / sqrt(t).
  static StepSchedule InverseSqrt(double a);

  double operator()(long t) const;

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }

 private:
  StepSchedule(Kind kind, double scale) : kind_(kind), scale_(scale) {}

  Kind kind_;
  double scale_;  // eta for constant/fixed-horizon, a for inverse-sqrt
};

// B(w || u) = psi(w) - psi(u) - <grad psi(u), w - u>. For negative entropy
// this is the generalized KL divergence with 0 log 0 = 0.
double Bregman(Regularizer reg, const Vec& w, const Vec& u);

// Euclidean projection onto the set. Simplex projection uses the
// sort-and-threshold algorithm.
Vec Project(const FeasibleSet& set, const Vec& x);

// argmin_{x in set} <grad, x> + (1/eta) B(x || x_t).
//
// The euclidean map reduces to Project(set, x_t - eta * grad). Negative
// entropy applies the multiplicative update x_j exp(-eta grad_j); the result
// is renormalized on the simplex and clamped on boxes (both exact Bregman
// projections for a separable entropy).
Vec MirrorStep(Regularizer reg, const FeasibleSet& set, const Vec& x_t,
               const Vec& grad, double eta);

// {x : normal . x <= offset}
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

struct AlternatingProjectionOptions {
  int max_iter = 10000;
  double tol = 1e-8;
};

// Cycles through the halfspaces and then the base set until every halfspace
// is violated by at most tol. With a box or orthant base each sub-step
// projects onto the halfspace intersected with the base exactly. The result
// is in the base set exactly. Throws NonConvergenceError carrying the final
// violation after max_iter sweeps.
Vec AlternatingProject(std::span<const Halfspace> halfspaces,
                       const FeasibleSet& base, const Vec& x,
                       const AlternatingProjectionOptions& options = {});

// Convenience form: intersection of halfspaces with the nonnegative orthant
// (orthant = true) or with nothing at all (orthant = false).
Vec AlternatingProject(std::span<const Halfspace> halfspaces, bool orthant,
                       const Vec& x,
                       const AlternatingProjectionOptions& options = {});

double HalfspaceViolation(std::span<const Halfspace> halfspaces, const Vec& x);

}  // namespace stackelberg
