#include "stackelberg/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stackelberg {

namespace {

void RequirePositive(const Mat& m, const char* what) {
  if (m.size() == 0) {
    throw Error(ErrorKind::kInvalidArgument, std::string(what) + " must not be empty");
  }
  if (!(m.array() > 0.0).all() || !m.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument,
                std::string(what) + " must be finite and strictly positive");
  }
}

void RequireLength(const Vec& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    std::ostringstream os;
    os << what << " has length " << v.size() << ", expected " << n;
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
}

}  // namespace

const char* ToString(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::kLinear: return "linear";
    case UtilityKind::kCobbDouglas: return "cobb-douglas";
    case UtilityKind::kLeontief: return "leontief";
  }
  return "unknown";
}

UtilityKind ParseUtilityKind(std::string_view name) {
  if (name == "linear") return UtilityKind::kLinear;
  if (name == "cobb-douglas") return UtilityKind::kCobbDouglas;
  if (name == "leontief") return UtilityKind::kLeontief;
  throw Error(ErrorKind::kInvalidArgument, "unknown utility kind '" + std::string(name) + "'");
}

FisherMarket::FisherMarket(UtilityKind kind, Mat valuations, Vec budgets, Vec supplies)
    : kind_(kind),
      valuations_(std::move(valuations)),
      budgets_(std::move(budgets)),
      supplies_(std::move(supplies)) {
  RequirePositive(valuations_, "valuations");
  RequireLength(budgets_, valuations_.rows(), "budgets");
  RequireLength(supplies_, valuations_.cols(), "supplies");
  RequirePositive(budgets_, "budgets");
  RequirePositive(supplies_, "supplies");
  if (kind_ == UtilityKind::kCobbDouglas) {
    // Rows already normalized up to roundoff are kept bit for bit, so that
    // reading back a written market reproduces it exactly.
    for (Eigen::Index i = 0; i < valuations_.rows(); ++i) {
      const double sum = valuations_.row(i).sum();
      if (std::abs(sum - 1.0) > 1e-14) valuations_.row(i) /= sum;
    }
  }
}

double UtilityEval(UtilityKind kind, const Vec& v, const Vec& x) {
  RequireLength(x, v.size(), "bundle");
  switch (kind) {
    case UtilityKind::kLinear:
      return v.dot(x);
    case UtilityKind::kCobbDouglas: {
      double log_u = 0.0;
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (x[j] <= 0.0) return 0.0;
        log_u += v[j] * std::log(x[j]);
      }
      return std::exp(log_u);
    }
    case UtilityKind::kLeontief:
      return (x.array() / v.array()).minCoeff();
  }
  return 0.0;
}

Vec UtilitySubgradient(UtilityKind kind, const Vec& v, const Vec& x) {
  RequireLength(x, v.size(), "bundle");
  switch (kind) {
    case UtilityKind::kLinear:
      return v;
    case UtilityKind::kCobbDouglas: {
      const Vec clamped = x.cwiseMax(kAllocationFloor);
      const double u = UtilityEval(kind, v, clamped);
      return (v.array() * u / clamped.array()).matrix();
    }
    case UtilityKind::kLeontief: {
      Eigen::Index k = 0;
      (x.array() / v.array()).minCoeff(&k);
      Vec g = Vec::Zero(v.size());
      g[k] = 1.0 / v[k];
      return g;
    }
  }
  return v;
}

Vec Demand(UtilityKind kind, const Vec& v, double budget, const Vec& prices) {
  RequireLength(prices, v.size(), "prices");
  if (!(prices.array() > 0.0).all()) {
    throw Error(ErrorKind::kDomain, "demand needs strictly positive prices");
  }
  switch (kind) {
    case UtilityKind::kLinear: {
      const Vec bang = (v.array() / prices.array()).matrix();
      const double best = bang.maxCoeff();
      const double cutoff = best * (1.0 - kLinearTieTol);
      int ties = 0;
      for (Eigen::Index j = 0; j < bang.size(); ++j) ties += bang[j] >= cutoff ? 1 : 0;
      Vec x = Vec::Zero(v.size());
      for (Eigen::Index j = 0; j < bang.size(); ++j) {
        if (bang[j] >= cutoff) x[j] = budget / (ties * prices[j]);
      }
      return x;
    }
    case UtilityKind::kCobbDouglas:
      return (budget * v.array() / prices.array()).matrix();
    case UtilityKind::kLeontief:
      return (budget / v.dot(prices)) * v;
  }
  return Vec::Zero(v.size());
}

Mat MarketDemand(const FisherMarket& market, const Vec& prices) {
  RequireLength(prices, market.goods(), "prices");
  const Vec floored = prices.cwiseMax(kPriceFloor);
  Mat x(market.buyers(), market.goods());
  for (int i = 0; i < market.buyers(); ++i) {
    x.row(i) = Demand(market.kind(), market.valuations().row(i).transpose(),
                      market.budgets()[i], floored)
                   .transpose();
  }
  return x;
}

double EgValue(const FisherMarket& market, const Vec& prices) {
  RequireLength(prices, market.goods(), "prices");
  if (!(prices.array() > 0.0).all()) {
    throw Error(ErrorKind::kDomain, "Eisenberg-Gale value needs strictly positive prices");
  }
  const Mat x = MarketDemand(market, prices);
  double value = market.supplies().dot(prices);
  for (int i = 0; i < market.buyers(); ++i) {
    const double u = UtilityEval(market.kind(), market.valuations().row(i).transpose(),
                                 x.row(i).transpose());
    if (!(u > 0.0)) {
      std::ostringstream os;
      os << "buyer " << i << " has zero utility at demand";
      throw Error(ErrorKind::kDomain, os.str());
    }
    value += market.budgets()[i] * std::log(u);
  }
  return value;
}

Vec PriceGradient(const FisherMarket& market, const Mat& allocation) {
  if (allocation.rows() != market.buyers() || allocation.cols() != market.goods()) {
    throw Error(ErrorKind::kDimensionMismatch, "allocation shape does not match the market");
  }
  return market.supplies() - allocation.colwise().sum().transpose();
}

Mat AllocationGradient(const FisherMarket& market, const Vec& prices, const Mat& allocation) {
  if (allocation.rows() != market.buyers() || allocation.cols() != market.goods()) {
    throw Error(ErrorKind::kDimensionMismatch, "allocation shape does not match the market");
  }
  RequireLength(prices, market.goods(), "prices");
  Mat grad(market.buyers(), market.goods());
  for (int i = 0; i < market.buyers(); ++i) {
    const Vec v = market.valuations().row(i).transpose();
    Vec x = allocation.row(i).transpose();
    if (market.kind() == UtilityKind::kCobbDouglas) x = x.cwiseMax(kAllocationFloor);
    const double u = UtilityEval(market.kind(), v, x);
    if (!(u > 0.0)) {
      std::ostringstream os;
      os << "buyer " << i << " has zero utility; allocation gradient undefined";
      throw Error(ErrorKind::kDomain, os.str());
    }
    grad.row(i) =
        (market.budgets()[i] / u * UtilitySubgradient(market.kind(), v, x) - prices).transpose();
  }
  return grad;
}

CeReport CeCheck(const FisherMarket& market, const MarketOutcome& outcome, double tol) {
  const int n = market.buyers();
  const int m = market.goods();
  if (outcome.prices.size() != m || outcome.allocation.rows() != n ||
      outcome.allocation.cols() != m) {
    throw Error(ErrorKind::kDimensionMismatch, "outcome shape does not match the market");
  }
  CeReport report;
  bool ok = true;
  const Vec sold = outcome.allocation.colwise().sum().transpose();
  for (int j = 0; j < m; ++j) {
    const double excess = sold[j] - market.supplies()[j];
    const double r = outcome.prices[j] > 0.0 ? std::abs(excess) : std::max(0.0, excess);
    report.clearing_residual = std::max(report.clearing_residual, r);
    if (r > tol * std::max(1.0, market.supplies()[j])) ok = false;
  }
  report.optimality_gaps = Vec::Zero(n);
  report.budget_violations = Vec::Zero(n);
  const Vec floored = outcome.prices.cwiseMax(kPriceFloor);
  for (int i = 0; i < n; ++i) {
    const Vec v = market.valuations().row(i).transpose();
    const Vec x = outcome.allocation.row(i).transpose();
    const double b = market.budgets()[i];
    // Leontief demand stays finite at zero prices, so free goods are not floored.
    const double cost = v.dot(outcome.prices);
    const double best = market.kind() == UtilityKind::kLeontief && cost > 0.0
                            ? b / cost
                            : UtilityEval(market.kind(), v, Demand(market.kind(), v, b, floored));
    const double have = UtilityEval(market.kind(), v, x);
    report.optimality_gaps[i] = best - have;
    report.budget_violations[i] = std::max(0.0, x.dot(outcome.prices) - b);
    const double scale = std::max(1.0, std::abs(best));
    if (report.optimality_gaps[i] > tol * scale || report.optimality_gaps[i] < -tol * scale) {
      ok = false;
    }
    if (report.budget_violations[i] > tol * std::max(1.0, b)) ok = false;
  }
  if ((outcome.prices.array() < 0.0).any() || (outcome.allocation.array() < 0.0).any()) ok = false;
  report.pass = ok;
  return report;
}

DistanceReport DistanceToCe(const MarketOutcome& outcome, const MarketOutcome& equilibrium) {
  if (outcome.prices.size() != equilibrium.prices.size() ||
      outcome.allocation.rows() != equilibrium.allocation.rows() ||
      outcome.allocation.cols() != equilibrium.allocation.cols()) {
    throw Error(ErrorKind::kDimensionMismatch, "outcomes have different shapes");
  }
  DistanceReport report;
  double frob2 = 0.0;
  for (Eigen::Index j = 0; j < outcome.allocation.cols(); ++j) {
    const double a = outcome.allocation.col(j).sum();
    const double b = equilibrium.allocation.col(j).sum();
    if (!(a > 0.0) || !(b > 0.0)) {
      report.skipped_column = true;
      continue;
    }
    frob2 += (outcome.allocation.col(j) / a - equilibrium.allocation.col(j) / b).squaredNorm();
  }
  report.value = (outcome.prices - equilibrium.prices).norm() + std::sqrt(frob2);
  return report;
}

Vec FlattenAllocation(const Mat& allocation) {
  Vec flat(allocation.size());
  for (Eigen::Index i = 0; i < allocation.rows(); ++i) {
    flat.segment(i * allocation.cols(), allocation.cols()) = allocation.row(i).transpose();
  }
  return flat;
}

Mat UnflattenAllocation(const Vec& flat, int buyers, int goods) {
  if (flat.size() != static_cast<Eigen::Index>(buyers) * goods) {
    throw Error(ErrorKind::kDimensionMismatch, "flat allocation has the wrong length");
  }
  Mat x(buyers, goods);
  for (int i = 0; i < buyers; ++i) x.row(i) = flat.segment(i * goods, goods).transpose();
  return x;
}

Game FisherGame(const FisherMarket& market) {
  const int n = market.buyers();
  const int m = market.goods();
  Game g;
  g.set_x = FeasibleSet::NonnegativeOrthant(m);
  g.set_y = FeasibleSet::NonnegativeOrthant(n * m);
  g.num_constraints = n;
  auto utility = [market](int i, const Vec& xi) {
    Vec x = xi;
    if (market.kind() == UtilityKind::kCobbDouglas) x = x.cwiseMax(kAllocationFloor);
    return std::max(UtilityEval(market.kind(), market.valuations().row(i).transpose(), x),
                    std::numeric_limits<double>::min());
  };
  g.objective = [market, utility, n, m](const Vec& p, const Vec& y) {
    double value = market.supplies().dot(p);
    for (int i = 0; i < n; ++i) {
      value += market.budgets()[i] * std::log(utility(i, y.segment(i * m, m)));
    }
    return value;
  };
  g.grad_x_objective = [market](const Vec&, const Vec&) { return market.supplies(); };
  g.grad_y_objective = [market, utility, n, m](const Vec&, const Vec& y) {
    Vec grad(n * m);
    for (int i = 0; i < n; ++i) {
      const Vec xi = y.segment(i * m, m);
      grad.segment(i * m, m) =
          market.budgets()[i] / utility(i, xi) *
          UtilitySubgradient(market.kind(), market.valuations().row(i).transpose(), xi);
    }
    return grad;
  };
  g.constraints = [market, n, m](const Vec& p, const Vec& y) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = market.budgets()[i] - y.segment(i * m, m).dot(p);
    return c;
  };
  g.grad_x_constraints = [n, m](const Vec&, const Vec& y) {
    Mat jac(n, m);
    for (int i = 0; i < n; ++i) jac.row(i) = -y.segment(i * m, m).transpose();
    return jac;
  };
  g.grad_y_constraints = [n, m](const Vec& p, const Vec&) {
    Mat jac = Mat::Zero(n, n * m);
    for (int i = 0; i < n; ++i) jac.block(i, i * m, 1, m) = -p.transpose();
    return jac;
  };
  g.best_response_oracle = [market](const Vec& p) {
    return FlattenAllocation(MarketDemand(market, p));
  };
  g.kkt_oracle = [n](const Vec&, const Vec&) { return Vec::Ones(n); };
  g.global_multiplier = Vec::Ones(n);
  return g;
}

}  // namespace stackelberg
