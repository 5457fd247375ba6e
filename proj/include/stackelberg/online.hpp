#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stackelberg/game.hpp"

namespace stackelberg {

struct QuadraticSaddleConfig {
  int dim_x = 2;
  int dim_y = 2;
  double mu_x = 1.0;
  double mu_y = 1.0;
  // Smoothness constant used by the bounds. Zero selects the smallest valid
  // value, RequiredSmoothness().
  double smoothness = 0.0;
  // dim_x x dim_y; empty means zero coupling.
  Mat coupling;
  // Per-step center drift bound d.
  double drift = 0.1;
  long horizon = 100;
  std::uint64_t seed = 0;
  // Initial centers are drawn from U[-center_scale, center_scale].
  double center_scale = 1.0;
};

// f_t(x, y) = (mu_x/2)|x - a_t|^2 - (mu_y/2)|y - c_t|^2 + x^T Q y for
// t = 0..T, on boxes sized so that every equilibrium is interior and the
// y best response is never clamped for x in the x-box.
class QuadraticSaddleSequence {
 public:
  // Centers follow a_{t+1} = a_t + u_t r_t with u_t a uniform unit direction
  // and r_t ~ U[0, d]; same for c_t. Stream Rng(seed, 0).
  explicit QuadraticSaddleSequence(const QuadraticSaddleConfig& config);
  // Explicit centers a_0..a_T, c_0..c_T. drift is the largest observed step.
  QuadraticSaddleSequence(double mu_x, double mu_y, Mat coupling, std::vector<Vec> x_centers,
                          std::vector<Vec> y_centers, double smoothness = 0.0);

  double mu_x() const { return mu_x_; }
  double mu_y() const { return mu_y_; }
  double smoothness() const { return smoothness_; }
  const Mat& coupling() const { return q_; }
  double drift() const { return drift_; }
  long horizon() const { return static_cast<long>(a_.size()) - 1; }
  int dim_x() const { return static_cast<int>(q_.rows()); }
  int dim_y() const { return static_cast<int>(q_.cols()); }
  const Vec& x_center(long t) const;
  const Vec& y_center(long t) const;
  const FeasibleSet& set_x() const { return set_x_; }
  const FeasibleSet& set_y() const { return set_y_; }

  // Smallest L for which f_t(., y), -f_t(x, .) and the value function
  // V_t(x) = max_y f_t(x, y) are all L-smooth: max(mu_y, mu_x + |Q|^2/mu_y).
  double RequiredSmoothness() const;

  double Objective(long t, const Vec& x, const Vec& y) const;
  Vec GradX(long t, const Vec& x, const Vec& y) const;
  Vec GradY(long t, const Vec& x, const Vec& y) const;
  // Exact minimizer of f_t(., y) over the x-box.
  Vec BestResponseX(long t, const Vec& y) const;
  // Exact maximizer of f_t(x, .) over the y-box.
  Vec BestResponseY(long t, const Vec& x) const;
  double Value(long t, const Vec& x) const;
  // mu_x (x - a_t) + Q y*(x).
  Vec ValueGradient(long t, const Vec& x) const;

 private:
  void Finish(double smoothness);

  double mu_x_;
  double mu_y_;
  double smoothness_ = 0.0;
  Mat q_;
  std::vector<Vec> a_;
  std::vector<Vec> c_;
  double drift_ = 0.0;
  FeasibleSet set_x_ = FeasibleSet::NonnegativeOrthant(1);
  FeasibleSet set_y_ = FeasibleSet::NonnegativeOrthant(1);
};

// Solves mu_x (x - a_t) + Q y = 0, -mu_y (y - c_t) + Q^T x = 0.
StrategyProfile NashOracle(const QuadraticSaddleSequence& seq, long t);

// delta = 2 eta mu L / (L + mu).
double Contraction(double eta, double mu, double smoothness);

// (1 - delta)^{T/2} init + 2 d / delta. Throws unless 0 < delta <= 1.
double RobustnessBound(double mu, double smoothness, double eta, double drift, long horizon,
                       double init_dist);

// (1 - delta)^{T/2} init + sum_{t=1}^T (1 - delta)^{(T-t)/2} drifts[t-1].
double RobustnessSumBound(double delta, double init_dist, std::span<const double> drifts);

struct RobustnessStep {
  long t = 0;
  double dist_x = 0.0;
  // Zero in asymmetric runs, where only the leader is tracked.
  double dist_y = 0.0;
  // Bounds on dist_x (asymmetric) or dist_x + dist_y (symmetric).
  double bound_sum = 0.0;
  double bound_simple = 0.0;
  bool violates_sum = false;
  bool violates_simple = false;
};

struct RobustnessReport {
  bool symmetric = false;
  double delta = 0.0;
  double delta_x = 0.0;
  double delta_y = 0.0;
  // d used in the simplified bound: max of the configured drift and every
  // observed comparator step.
  double drift = 0.0;
  double init_x = 0.0;
  double init_y = 0.0;
  std::vector<RobustnessStep> steps;
  long violations_sum = 0;
  long violations_simple = 0;
};

// Projected OGD on the value functions: x_t = P(x_{t-1} - eta grad V_{t-1}(x_{t-1})),
// compared with x*_t of NashOracle. Requires 0 < eta <= 2/(mu_x + L).
RobustnessReport RunAsymTracking(const QuadraticSaddleSequence& seq, double eta, const Vec& x0);

// Both players run projected OGD on f_{t-1} at (x_{t-1}, y_{t-1}); the
// comparators are x*_t = argmin f_t(., y_t) and y*_t = argmax f_t(x_t, .).
// Requires 0 < eta_x <= 2/(mu_x + L) and 0 < eta_y <= 2/(mu_y + L).
RobustnessReport RunSymTracking(const QuadraticSaddleSequence& seq, double eta_x, double eta_y,
                                const Vec& x0, const Vec& y0);

}  // namespace stackelberg
