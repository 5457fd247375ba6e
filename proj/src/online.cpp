#include "stackelberg/online.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "stackelberg/mirror.hpp"
#include "stackelberg/rng.hpp"

namespace stackelberg {

namespace {

// Slack for roundoff when comparing a measured distance with its bound.
constexpr double kBoundSlack = 1e-12;
// Boxes extend this many drift bounds (plus one) past every center and equilibrium.
constexpr double kBoxMargin = 10.0;

bool Exceeds(double measured, double bound) {
  return measured > bound + kBoundSlack * (1.0 + std::abs(bound));
}

void RequireRate(double eta, double mu, double smoothness, const char* name) {
  const double limit = 2.0 / (mu + smoothness);
  if (!(eta > 0.0) || eta > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << name << " = " << eta << " outside (0, 2/(mu+L)] = (0, " << limit << "]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
}

void RequireStart(const FeasibleSet& set, const Vec& v, const char* name) {
  if (v.size() != set.dim()) {
    std::ostringstream os;
    os << name << " has length " << v.size() << ", expected " << set.dim();
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if (!v.allFinite() || !set.Contains(v)) {
    std::ostringstream os;
    os << name << " lies outside its box";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
}

double InfNorm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double SpectralNorm(const Mat& m) { return Eigen::JacobiSVD<Mat>(m).singularValues()[0]; }

}  // namespace

QuadraticSaddleSequence::QuadraticSaddleSequence(const QuadraticSaddleConfig& config)
    : mu_x_(config.mu_x), mu_y_(config.mu_y) {
  if (config.dim_x < 1 || config.dim_y < 1) {
    throw Error(ErrorKind::kInvalidArgument, "dimensions must be at least 1");
  }
  if (config.horizon < 1) throw Error(ErrorKind::kInvalidArgument, "horizon must be at least 1");
  if (!(config.drift >= 0.0) || !std::isfinite(config.drift)) {
    throw Error(ErrorKind::kInvalidArgument, "drift bound must be finite and nonnegative");
  }
  if (!(config.center_scale >= 0.0) || !std::isfinite(config.center_scale)) {
    throw Error(ErrorKind::kInvalidArgument, "center scale must be finite and nonnegative");
  }
  q_ = config.coupling.size() == 0 ? Mat::Zero(config.dim_x, config.dim_y) : config.coupling;
  if (q_.rows() != config.dim_x || q_.cols() != config.dim_y) {
    throw Error(ErrorKind::kDimensionMismatch, "coupling must be dim_x by dim_y");
  }
  Rng rng(config.seed, 0);
  Vec a(config.dim_x);
  Vec c(config.dim_y);
  for (int i = 0; i < config.dim_x; ++i) a[i] = rng.Uniform(-config.center_scale, config.center_scale);
  for (int i = 0; i < config.dim_y; ++i) c[i] = rng.Uniform(-config.center_scale, config.center_scale);
  a_.reserve(config.horizon + 1);
  c_.reserve(config.horizon + 1);
  a_.push_back(a);
  c_.push_back(c);
  for (long t = 1; t <= config.horizon; ++t) {
    a += rng.UnitDirection(config.dim_x) * rng.Uniform(0.0, config.drift);
    c += rng.UnitDirection(config.dim_y) * rng.Uniform(0.0, config.drift);
    a_.push_back(a);
    c_.push_back(c);
  }
  drift_ = config.drift;
  Finish(config.smoothness);
}

QuadraticSaddleSequence::QuadraticSaddleSequence(double mu_x, double mu_y, Mat coupling,
                                                 std::vector<Vec> x_centers,
                                                 std::vector<Vec> y_centers, double smoothness)
    : mu_x_(mu_x), mu_y_(mu_y), q_(std::move(coupling)), a_(std::move(x_centers)),
      c_(std::move(y_centers)) {
  if (a_.empty() || a_.size() != c_.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "need the same nonzero number of x and y centers");
  }
  if (a_.size() < 2) throw Error(ErrorKind::kInvalidArgument, "horizon must be at least 1");
  for (std::size_t t = 0; t < a_.size(); ++t) {
    if (a_[t].size() != q_.rows() || c_[t].size() != q_.cols()) {
      std::ostringstream os;
      os << "centers at t = " << t << " do not match the coupling shape";
      throw Error(ErrorKind::kDimensionMismatch, os.str());
    }
    if (t > 0) {
      drift_ = std::max({drift_, (a_[t] - a_[t - 1]).norm(), (c_[t] - c_[t - 1]).norm()});
    }
  }
  Finish(smoothness);
}

void QuadraticSaddleSequence::Finish(double smoothness) {
  if (!(mu_x_ > 0.0) || !(mu_y_ > 0.0) || !std::isfinite(mu_x_) || !std::isfinite(mu_y_)) {
    throw Error(ErrorKind::kInvalidArgument, "mu_x and mu_y must be positive and finite");
  }
  if (q_.rows() < 1 || q_.cols() < 1 || !q_.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "coupling must be a finite nonempty matrix");
  }
  const double q_norm = SpectralNorm(q_);
  if (!(mu_x_ * mu_y_ > q_norm * q_norm)) {
    std::ostringstream os;
    os << "need mu_x mu_y > |Q|^2, got " << mu_x_ * mu_y_ << " <= " << q_norm * q_norm;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const double required = RequiredSmoothness();
  if (smoothness == 0.0) {
    smoothness_ = required;
  } else if (!(smoothness >= required * (1.0 - 1e-12)) || !std::isfinite(smoothness)) {
    std::ostringstream os;
    os << "smoothness " << smoothness << " is below the required " << required;
    throw Error(ErrorKind::kInvalidArgument, os.str());
  } else {
    smoothness_ = smoothness;
  }

  // Boxes are only needed for the equilibria, so size them from a temporary
  // unbounded set first.
  const int nx = dim_x();
  const int ny = dim_y();
  set_x_ = FeasibleSet::UniformBox(nx, -1e300, 1e300);
  set_y_ = FeasibleSet::UniformBox(ny, -1e300, 1e300);
  double reach_x = 0.0;
  double reach_y = 0.0;
  for (long t = 0; t <= horizon(); ++t) {
    const StrategyProfile eq = NashOracle(*this, t);
    reach_x = std::max({reach_x, InfNorm(a_[t]), InfNorm(eq.x)});
    reach_y = std::max({reach_y, InfNorm(c_[t]), InfNorm(eq.y)});
  }
  const double margin = kBoxMargin * drift_ + 1.0;
  const double half_x = reach_x + margin;
  // y*(x) = c + Q^T x / mu_y stays unclamped for every x in the x-box.
  const double coupling_reach = q_.cwiseAbs().colwise().sum().maxCoeff() * half_x / mu_y_;
  const double half_y = reach_y + coupling_reach + margin;
  set_x_ = FeasibleSet::UniformBox(nx, -half_x, half_x);
  set_y_ = FeasibleSet::UniformBox(ny, -half_y, half_y);
}

const Vec& QuadraticSaddleSequence::x_center(long t) const {
  if (t < 0 || t > horizon()) throw Error(ErrorKind::kInvalidArgument, "time index out of range");
  return a_[t];
}

const Vec& QuadraticSaddleSequence::y_center(long t) const {
  if (t < 0 || t > horizon()) throw Error(ErrorKind::kInvalidArgument, "time index out of range");
  return c_[t];
}

double QuadraticSaddleSequence::RequiredSmoothness() const {
  const double q_norm = SpectralNorm(q_);
  return std::max(mu_y_, mu_x_ + q_norm * q_norm / mu_y_);
}

double QuadraticSaddleSequence::Objective(long t, const Vec& x, const Vec& y) const {
  return 0.5 * mu_x_ * (x - x_center(t)).squaredNorm() -
         0.5 * mu_y_ * (y - y_center(t)).squaredNorm() + x.dot(q_ * y);
}

Vec QuadraticSaddleSequence::GradX(long t, const Vec& x, const Vec& y) const {
  return mu_x_ * (x - x_center(t)) + q_ * y;
}

Vec QuadraticSaddleSequence::GradY(long t, const Vec& x, const Vec& y) const {
  return -mu_y_ * (y - y_center(t)) + q_.transpose() * x;
}

// f_t(., y) is isotropic, so clamping its free minimizer is exact on a box.
Vec QuadraticSaddleSequence::BestResponseX(long t, const Vec& y) const {
  return Project(set_x_, x_center(t) - q_ * y / mu_x_);
}

Vec QuadraticSaddleSequence::BestResponseY(long t, const Vec& x) const {
  return Project(set_y_, y_center(t) + q_.transpose() * x / mu_y_);
}

double QuadraticSaddleSequence::Value(long t, const Vec& x) const {
  return Objective(t, x, BestResponseY(t, x));
}

Vec QuadraticSaddleSequence::ValueGradient(long t, const Vec& x) const {
  return GradX(t, x, BestResponseY(t, x));
}

StrategyProfile NashOracle(const QuadraticSaddleSequence& seq, long t) {
  const int nx = seq.dim_x();
  const int ny = seq.dim_y();
  Mat k(nx + ny, nx + ny);
  k.topLeftCorner(nx, nx) = seq.mu_x() * Mat::Identity(nx, nx);
  k.topRightCorner(nx, ny) = seq.coupling();
  k.bottomLeftCorner(ny, nx) = seq.coupling().transpose();
  k.bottomRightCorner(ny, ny) = -seq.mu_y() * Mat::Identity(ny, ny);
  Vec rhs(nx + ny);
  rhs << seq.mu_x() * seq.x_center(t), -seq.mu_y() * seq.y_center(t);
  const Vec z = k.partialPivLu().solve(rhs);
  StrategyProfile out{z.head(nx), z.tail(ny)};
  if (!seq.set_x().Contains(out.x, 0.0) || !seq.set_y().Contains(out.y, 0.0)) {
    std::ostringstream os;
    os << "equilibrium at t = " << t << " is not inside the boxes";
    throw Error(ErrorKind::kInfeasible, os.str());
  }
  return out;
}

double Contraction(double eta, double mu, double smoothness) {
  return 2.0 * eta * mu * smoothness / (smoothness + mu);
}

double RobustnessBound(double mu, double smoothness, double eta, double drift, long horizon,
                       double init_dist) {
  if (!(mu > 0.0) || !(smoothness > 0.0) || !(drift >= 0.0) || horizon < 0 ||
      !(init_dist >= 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "need mu, L > 0 and nonnegative drift, horizon and initial distance");
  }
  const double delta = Contraction(eta, mu, smoothness);
  if (!(delta > 0.0) || delta > 1.0) {
    std::ostringstream os;
    os << "delta = " << delta << " outside (0, 1]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  return std::pow(1.0 - delta, 0.5 * static_cast<double>(horizon)) * init_dist +
         2.0 * drift / delta;
}

double RobustnessSumBound(double delta, double init_dist, std::span<const double> drifts) {
  if (!(delta > 0.0) || delta > 1.0) {
    std::ostringstream os;
    os << "delta = " << delta << " outside (0, 1]";
    throw Error(ErrorKind::kInvalidArgument, os.str());
  }
  const double rate = 1.0 - delta;
  const auto horizon = static_cast<double>(drifts.size());
  double total = std::pow(rate, 0.5 * horizon) * init_dist;
  for (std::size_t k = 0; k < drifts.size(); ++k) {
    const double t = static_cast<double>(k + 1);
    total += std::pow(rate, 0.5 * (horizon - t)) * drifts[k];
  }
  return total;
}

RobustnessReport RunAsymTracking(const QuadraticSaddleSequence& seq, double eta, const Vec& x0) {
  const double mu = seq.mu_x();
  const double big_l = seq.smoothness();
  RequireRate(eta, mu, big_l, "eta");
  RequireStart(seq.set_x(), x0, "x0");
  const long horizon = seq.horizon();

  RobustnessReport report;
  report.delta = std::min(1.0, Contraction(eta, mu, big_l));
  report.delta_x = report.delta;
  const double shrink = std::sqrt(1.0 - report.delta);

  Vec prev_star = NashOracle(seq, 0).x;
  report.init_x = (prev_star - x0).norm();
  report.drift = seq.drift();
  std::vector<double> steps(horizon);
  std::vector<double> dist(horizon);
  Vec x = x0;
  for (long t = 1; t <= horizon; ++t) {
    x = Project(seq.set_x(), x - eta * seq.ValueGradient(t - 1, x));
    const Vec star = NashOracle(seq, t).x;
    dist[t - 1] = (star - x).norm();
    steps[t - 1] = (star - prev_star).norm();
    report.drift = std::max(report.drift, steps[t - 1]);
    prev_star = star;
  }

  double sum_bound = report.init_x;
  report.steps.reserve(horizon);
  for (long t = 1; t <= horizon; ++t) {
    sum_bound = shrink * sum_bound + steps[t - 1];
    RobustnessStep step;
    step.t = t;
    step.dist_x = dist[t - 1];
    step.bound_sum = sum_bound;
    step.bound_simple = std::pow(1.0 - report.delta, 0.5 * static_cast<double>(t)) * report.init_x +
                        2.0 * report.drift / report.delta;
    step.violates_sum = Exceeds(step.dist_x, step.bound_sum);
    step.violates_simple = Exceeds(step.dist_x, step.bound_simple);
    report.violations_sum += step.violates_sum;
    report.violations_simple += step.violates_simple;
    report.steps.push_back(step);
  }
  return report;
}

RobustnessReport RunSymTracking(const QuadraticSaddleSequence& seq, double eta_x, double eta_y,
                                const Vec& x0, const Vec& y0) {
  const double big_l = seq.smoothness();
  RequireRate(eta_x, seq.mu_x(), big_l, "eta_x");
  RequireRate(eta_y, seq.mu_y(), big_l, "eta_y");
  RequireStart(seq.set_x(), x0, "x0");
  RequireStart(seq.set_y(), y0, "y0");
  const long horizon = seq.horizon();

  RobustnessReport report;
  report.symmetric = true;
  report.delta_x = std::min(1.0, Contraction(eta_x, seq.mu_x(), big_l));
  report.delta_y = std::min(1.0, Contraction(eta_y, seq.mu_y(), big_l));
  report.delta = std::min(report.delta_x, report.delta_y);
  const double shrink_x = std::sqrt(1.0 - report.delta_x);
  const double shrink_y = std::sqrt(1.0 - report.delta_y);

  Vec x = x0;
  Vec y = y0;
  Vec prev_x_star = seq.BestResponseX(0, y);
  Vec prev_y_star = seq.BestResponseY(0, x);
  report.init_x = (prev_x_star - x).norm();
  report.init_y = (prev_y_star - y).norm();
  report.drift = seq.drift();

  std::vector<double> dist_x(horizon);
  std::vector<double> dist_y(horizon);
  std::vector<double> sum_bound(horizon);
  double bound_x = report.init_x;
  double bound_y = report.init_y;
  for (long t = 1; t <= horizon; ++t) {
    const Vec gx = seq.GradX(t - 1, x, y);
    const Vec gy = seq.GradY(t - 1, x, y);
    x = Project(seq.set_x(), x - eta_x * gx);
    y = Project(seq.set_y(), y + eta_y * gy);
    const Vec x_star = seq.BestResponseX(t, y);
    const Vec y_star = seq.BestResponseY(t, x);
    dist_x[t - 1] = (x_star - x).norm();
    dist_y[t - 1] = (y_star - y).norm();
    const double step_x = (x_star - prev_x_star).norm();
    const double step_y = (y_star - prev_y_star).norm();
    report.drift = std::max({report.drift, step_x, step_y});
    bound_x = shrink_x * bound_x + step_x;
    bound_y = shrink_y * bound_y + step_y;
    sum_bound[t - 1] = bound_x + bound_y;
    prev_x_star = x_star;
    prev_y_star = y_star;
  }

  report.steps.reserve(horizon);
  const double init = report.init_x + report.init_y;
  for (long t = 1; t <= horizon; ++t) {
    RobustnessStep step;
    step.t = t;
    step.dist_x = dist_x[t - 1];
    step.dist_y = dist_y[t - 1];
    step.bound_sum = sum_bound[t - 1];
    step.bound_simple =
        2.0 * std::pow(1.0 - report.delta, 0.5 * static_cast<double>(t)) * init +
        4.0 * report.drift / report.delta;
    const double measured = step.dist_x + step.dist_y;
    step.violates_sum = Exceeds(measured, step.bound_sum);
    step.violates_simple = Exceeds(measured, step.bound_simple);
    report.violations_sum += step.violates_sum;
    report.violations_simple += step.violates_simple;
    report.steps.push_back(step);
  }
  return report;
}

}  // namespace stackelberg
