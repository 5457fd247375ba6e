#include "stackelberg/mirror.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

namespace stackelberg {

StepSchedule StepSchedule::Constant(double eta) {
  if (!(eta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step size must be positive");
  return StepSchedule(Kind::kConstant, eta);
}

StepSchedule StepSchedule::FixedHorizon(double c, double lipschitz, long horizon) {
  if (!(c > 0.0) || !(lipschitz > 0.0) || horizon <= 0) {
    throw Error(ErrorKind::kInvalidArgument,
                "fixed-horizon schedule needs c > 0, L > 0 and T > 0");
  }
  return StepSchedule(Kind::kFixedHorizon,
                      c / (lipschitz * std::sqrt(2.0 * static_cast<double>(horizon))));
}

StepSchedule StepSchedule::InverseSqrt(double a) {
  if (!(a > 0.0)) throw Error(ErrorKind::kInvalidArgument, "schedule scale must be positive");
  return StepSchedule(Kind::kInverseSqrt, a);
}

double StepSchedule::operator()(long t) const {
  if (t < 1) throw Error(ErrorKind::kInvalidArgument, "steps are numbered from 1");
  if (kind_ == Kind::kInverseSqrt) return scale_ / std::sqrt(static_cast<double>(t));
  return scale_;
}

namespace {

void CheckSameSize(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "vector lengths differ");
  }
}

Vec ProjectSimplex(const Vec& x, double mass) {
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - mass) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (x.array() - theta).cwiseMax(0.0).matrix();
}

Vec EntropyDomain(const Vec& x) {
  if (x.size() > 0 && x.minCoeff() < 0.0) {
    throw Error(ErrorKind::kDomain, "negative entropy requires nonnegative points");
  }
  return x.cwiseMax(kEntropyFloor);
}

}  // namespace

double Bregman(Regularizer reg, const Vec& w, const Vec& u) {
  CheckSameSize(w, u);
  if (reg == Regularizer::kEuclidean) return 0.5 * (w - u).squaredNorm();

  double total = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (!(u[j] > 0.0)) {
      throw Error(ErrorKind::kDomain, "entropy Bregman divergence needs u > 0");
    }
    if (w[j] < 0.0) {
      throw Error(ErrorKind::kDomain, "entropy Bregman divergence needs w >= 0");
    }
    if (w[j] > 0.0) total += w[j] * std::log(w[j] / u[j]);
    total += u[j] - w[j];
  }
  return std::max(total, 0.0);
}

Vec Project(const FeasibleSet& set, const Vec& x) {
  if (x.size() != set.dim()) {
    throw Error(ErrorKind::kDimensionMismatch, "point dimension does not match set");
  }
  switch (set.kind()) {
    case FeasibleSet::Kind::kBox:
      return x.cwiseMax(set.lower()).cwiseMin(set.upper());
    case FeasibleSet::Kind::kNonnegativeOrthant:
      return x.cwiseMax(0.0);
    case FeasibleSet::Kind::kScaledSimplex:
      return ProjectSimplex(x, set.mass());
  }
  return x;
}

Vec MirrorStep(Regularizer reg, const FeasibleSet& set, const Vec& x_t,
               const Vec& grad, double eta) {
  CheckSameSize(x_t, grad);
  if (!(eta > 0.0)) throw Error(ErrorKind::kInvalidArgument, "step size must be positive");
  if (reg == Regularizer::kEuclidean) return Project(set, x_t - eta * grad);

  const Vec x = EntropyDomain(x_t);
  Vec scaled = -eta * grad;
  switch (set.kind()) {
    case FeasibleSet::Kind::kScaledSimplex: {
      scaled.array() -= scaled.maxCoeff();
      Vec next = x.array() * scaled.array().exp();
      return next * (set.mass() / next.sum());
    }
    case FeasibleSet::Kind::kNonnegativeOrthant:
      return (x.array() * scaled.array().exp()).matrix().cwiseMax(kEntropyFloor);
    case FeasibleSet::Kind::kBox: {
      Vec next = x.array() * scaled.array().exp();
      return next.cwiseMax(set.lower().cwiseMax(kEntropyFloor)).cwiseMin(set.upper());
    }
  }
  return x;
}

double HalfspaceViolation(std::span<const Halfspace> halfspaces, const Vec& x) {
  double worst = 0.0;
  for (const Halfspace& h : halfspaces) {
    worst = std::max(worst, h.normal.dot(x) - h.offset);
  }
  return worst;
}

namespace {

bool IsSeparable(const FeasibleSet* base) {
  return base != nullptr && base->kind() != FeasibleSet::Kind::kScaledSimplex;
}

Vec ClampToBase(const FeasibleSet& base, const Vec& z) {
  if (base.kind() == FeasibleSet::Kind::kBox) {
    return z.cwiseMax(base.lower()).cwiseMin(base.upper());
  }
  return z.cwiseMax(0.0);
}

// Exact projection onto {normal . z <= offset} intersected with a box or the
// orthant: clamp(x - theta normal) for the smallest theta >= 0 that satisfies
// the halfspace, found by bisection on the monotone map theta -> normal . z.
// Returns false when no theta works.
bool ProjectHalfspaceInBase(const Halfspace& h, const FeasibleSet& base, const Vec& x,
                            Vec& out) {
  auto at = [&](double theta) { return ClampToBase(base, x - theta * h.normal); };
  Vec z = at(0.0);
  if (h.normal.dot(z) <= h.offset) {
    out = std::move(z);
    return true;
  }
  double hi = 1.0;
  for (int i = 0; h.normal.dot(at(hi)) > h.offset; ++i) {
    if (i == 200) return false;
    hi *= 2.0;
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h.normal.dot(at(mid)) > h.offset) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out = at(hi);
  return true;
}

Vec AlternatingProjectImpl(std::span<const Halfspace> halfspaces,
                           const FeasibleSet* base, const Vec& x,
                           const AlternatingProjectionOptions& options) {
  for (const Halfspace& h : halfspaces) {
    if (h.normal.size() != x.size()) {
      throw Error(ErrorKind::kDimensionMismatch, "halfspace normal has the wrong length");
    }
  }
  Vec z = base != nullptr ? Project(*base, x) : x;
  if (HalfspaceViolation(halfspaces, z) <= options.tol) return z;
  z = x;
  double violation = 0.0;
  const bool separable = IsSeparable(base);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    for (const Halfspace& h : halfspaces) {
      const double excess = h.normal.dot(z) - h.offset;
      if (separable) {
        // Each sub-step lands in halfspace-and-base exactly, so a single
        // halfspace needs one sweep.
        Vec next;
        if (ProjectHalfspaceInBase(h, *base, z, next)) {
          z = std::move(next);
          continue;
        }
      }
      const double norm2 = h.normal.squaredNorm();
      if (excess > 0.0 && norm2 > 0.0) z -= (excess / norm2) * h.normal;
    }
    if (base != nullptr) z = Project(*base, z);
    violation = HalfspaceViolation(halfspaces, z);
    if (violation <= options.tol) return z;
  }
  std::ostringstream os;
  os << "alternating projection did not converge in " << options.max_iter
     << " sweeps (violation " << violation << ")";
  throw NonConvergenceError(os.str(), violation);
}

}  // namespace

Vec AlternatingProject(std::span<const Halfspace> halfspaces,
                       const FeasibleSet& base, const Vec& x,
                       const AlternatingProjectionOptions& options) {
  return AlternatingProjectImpl(halfspaces, &base, x, options);
}

Vec AlternatingProject(std::span<const Halfspace> halfspaces, bool orthant,
                       const Vec& x,
                       const AlternatingProjectionOptions& options) {
  if (!orthant) return AlternatingProjectImpl(halfspaces, nullptr, x, options);
  const FeasibleSet base = FeasibleSet::NonnegativeOrthant(static_cast<int>(x.size()));
  return AlternatingProjectImpl(halfspaces, &base, x, options);
}

}  // namespace stackelberg
