#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "stackelberg/fisher.hpp"

namespace stackelberg {

namespace {

constexpr double kBarrierShrink = 0.1;
constexpr double kArmijo = 1e-4;
// Relative size of the final barrier weight; the duality gap of the barrier
// problem is (number of variables) * mu.
constexpr double kFinalBarrier = 1e-15;
// The linear program stops earlier and finishes by solving the equilibrium
// equations on the identified support exactly.
constexpr double kLinearFinalBarrier = 1e-12;
// Relative barrier weight from which support identification is attempted.
constexpr double kPurifyFrom = 1e-5;
// A barrier stage ends once the Newton decrement of objective / mu drops below
// this, or after kStageIterations steps.
constexpr double kCentered = 1e-10;
constexpr int kStageIterations = 40;
// Below this decrement of objective / mu the full Newton step is taken
// without a line search, which would only see roundoff there.
constexpr double kQuadraticRegion = 0.1;
constexpr double kMinStep = 1e-10;

// Largest step in (0, 1] keeping z + alpha dz strictly positive, backed off
// from the boundary.
double StepToBoundary(const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& dz) {
  double alpha = 1.0;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    if (dz[k] < 0.0) alpha = std::min(alpha, -0.99 * z[k] / dz[k]);
  }
  return alpha;
}

[[noreturn]] void FailCe(const char* what, double residual) {
  std::ostringstream os;
  os << what << " did not reach a certified equilibrium (residual " << residual << ")";
  throw NonConvergenceError(os.str(), residual);
}

MarketOutcome CobbDouglasCe(const FisherMarket& market) {
  const Mat& v = market.valuations();
  const Vec& b = market.budgets();
  const Vec& s = market.supplies();
  MarketOutcome out;
  out.prices = ((v.transpose() * b).array() / s.array()).matrix();
  out.allocation.resize(market.buyers(), market.goods());
  for (int i = 0; i < market.buyers(); ++i) {
    out.allocation.row(i) = (b[i] * v.row(i).array() / out.prices.transpose().array()).matrix();
  }
  return out;
}

// min_p s . p - sum_i b_i log(v_i . p) over p >= 0. Its gradient is the excess
// supply at Leontief demand, so the minimizer is an equilibrium price vector.
MarketOutcome LeontiefCe(const FisherMarket& market, const CeOptions& options) {
  const Mat& v = market.valuations();
  const Vec& b = market.budgets();
  const Vec& s = market.supplies();
  const int m = market.goods();
  const double scale = b.sum();

  auto objective = [&](const Vec& p, double mu) {
    return s.dot(p) - b.dot((v * p).array().log().matrix()) - mu * p.array().log().sum();
  };

  Vec p = Vec::Constant(m, scale / s.sum());
  double mu = scale / m;
  const double mu_final = kFinalBarrier * scale / m;
  int newton = 0;
  for (;;) {
    for (int stage = 0; stage < kStageIterations && newton < options.max_newton; ++stage, ++newton) {
      const Vec spend = v * p;
      const Vec w = (b.array() / spend.array()).matrix();
      const Vec grad = s - v.transpose() * w - (mu / p.array()).matrix();
      Mat hess = v.transpose() * (w.array() / spend.array()).matrix().asDiagonal() * v;
      hess.diagonal().array() += mu / p.array().square();
      const Vec dp = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dp);
      if (decrement <= kCentered * mu) break;
      double alpha = StepToBoundary(p, dp);
      if (decrement > kQuadraticRegion * mu) {
        const double f0 = objective(p, mu);
        while (alpha >= kMinStep &&
               objective(p + alpha * dp, mu) > f0 - kArmijo * alpha * decrement) {
          alpha *= 0.5;
        }
        if (alpha < kMinStep) break;
      }
      p += alpha * dp;
    }
    if (mu <= mu_final) break;
    mu = std::max(mu * kBarrierShrink, mu_final);
  }

  // Goods the barrier keeps only marginally priced are free at equilibrium.
  // Besides the tiny ones, that covers goods left over-supplied whose price
  // is just the barrier's complementarity term mu / excess; a nearly cleared
  // free good can hold a price far above the fixed level that way.
  const double free_level = 1e-10 * scale;
  {
    const Vec spend = v * p;
    const Vec excess = s - v.transpose() * (b.array() / spend.array()).matrix();
    for (int j = 0; j < m; ++j) {
      const bool barrier_priced = excess[j] > 0.0 && p[j] * excess[j] <= 100.0 * mu &&
                                  p[j] * s[j] <= 1e-6 * scale;
      if (p[j] * s[j] <= free_level || barrier_priced) p[j] = 0.0;
    }
  }
  // Newton without the barrier on the priced goods restores exact clearing
  // there after the free goods are dropped.
  std::vector<int> priced;
  for (int j = 0; j < m; ++j) {
    if (p[j] > 0.0) priced.push_back(j);
  }
  if (!priced.empty()) {
    const int k = static_cast<int>(priced.size());
    Mat vp(v.rows(), k);
    Vec sp(k), pp(k);
    for (int c = 0; c < k; ++c) {
      vp.col(c) = v.col(priced[c]);
      sp[c] = s[priced[c]];
      pp[c] = p[priced[c]];
    }
    for (int it = 0; it < 20; ++it) {
      const Vec spend = vp * pp;
      const Vec w = (b.array() / spend.array()).matrix();
      const Vec grad = sp - vp.transpose() * w;
      if (grad.lpNorm<Eigen::Infinity>() <= 1e-15 * sp.maxCoeff()) break;
      const Mat hess = vp.transpose() * (w.array() / spend.array()).matrix().asDiagonal() * vp;
      const Vec dp = -hess.ldlt().solve(grad);
      if (!dp.allFinite()) break;
      const double alpha = StepToBoundary(pp, dp);
      pp += alpha * dp;
    }
    for (int c = 0; c < k; ++c) p[priced[c]] = pp[c];
  }
  MarketOutcome out;
  out.prices = p;
  out.allocation.resize(market.buyers(), m);
  for (int i = 0; i < market.buyers(); ++i) {
    out.allocation.row(i) = (b[i] / v.row(i).dot(p)) * v.row(i);
  }
  return out;
}

// Solves the equilibrium equations of a linear market on a support read off
// `approx`: p_j = v_ij a_i on every edge (equal bang-per-buck 1 / a_i), and
// spending e_ij sums to b_i per buyer and to p_j s_j per good. The support is
// a spanning forest built from the largest holdings down, among holdings above
// level * s_j; generic equilibria live on a forest, and the greedy order drops
// the slow-to-vanish entries the barrier leaves behind. Unknowns are ordered
// a (n), p (m), e (edges).
MarketOutcome PurifyLinear(const FisherMarket& market, const Mat& approx, double level) {
  const Mat& v = market.valuations();
  const Vec& b = market.budgets();
  const Vec& s = market.supplies();
  const int n = market.buyers();
  const int m = market.goods();
  std::vector<std::pair<int, int>> candidates;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (approx(i, j) > level * s[j]) candidates.emplace_back(i, j);
    }
  }
  std::sort(candidates.begin(), candidates.end(), [&](const auto& l, const auto& r) {
    return approx(l.first, l.second) / s[l.second] > approx(r.first, r.second) / s[r.second];
  });
  // Union-find over buyers 0..n-1 and goods n..n+m-1.
  std::vector<int> parent(n + m);
  for (int k = 0; k < n + m; ++k) parent[k] = k;
  auto root = [&](int k) {
    while (parent[k] != k) k = parent[k] = parent[parent[k]];
    return k;
  };
  std::vector<std::pair<int, int>> edges;
  for (const auto& [i, j] : candidates) {
    const int ri = root(i);
    const int rj = root(n + j);
    if (ri == rj) continue;
    parent[ri] = rj;
    edges.emplace_back(i, j);
  }
  const int k = static_cast<int>(edges.size());
  Mat a = Mat::Zero(k + n + m, n + m + k);
  Vec rhs = Vec::Zero(k + n + m);
  for (int e = 0; e < k; ++e) {
    const auto [i, j] = edges[e];
    a(e, n + j) = 1.0;
    a(e, i) = -v(i, j);
    a(k + i, n + m + e) = 1.0;
    a(k + n + j, n + m + e) = 1.0;
  }
  for (int i = 0; i < n; ++i) rhs[k + i] = b[i];
  for (int j = 0; j < m; ++j) a(k + n + j, n + j) = -s[j];
  const Vec z = a.completeOrthogonalDecomposition().solve(rhs);

  MarketOutcome out;
  out.prices = z.segment(n, m);
  out.allocation = Mat::Zero(n, m);
  for (int e = 0; e < k; ++e) {
    const auto [i, j] = edges[e];
    out.allocation(i, j) = std::max(0.0, z[n + m + e]) / out.prices[j];
  }
  return out;
}

// max sum_i b_i log(v_i . x_i) subject to sum_i x_ij = s_j, x >= 0, by a
// feasible-start barrier Newton method. Each buyer's Hessian block is a
// diagonal plus a rank-one term and is inverted by Sherman-Morrison; the
// column constraints reduce to an m x m Schur complement. The Newton steps lose
// accuracy as mu shrinks, so once the support is visible the equilibrium
// equations on it are solved directly and the first certified result wins.
MarketOutcome LinearCe(const FisherMarket& market, const CeOptions& options) {
  const Mat& v = market.valuations();
  const Vec& b = market.budgets();
  const Vec& s = market.supplies();
  const int n = market.buyers();
  const int m = market.goods();
  const double scale = b.sum();

  Mat x = (Vec::Ones(n) * s.transpose()) / n;
  auto objective = [&](const Mat& z, double mu) {
    const Vec u = (v.array() * z.array()).rowwise().sum().matrix();
    return -b.dot(u.array().log().matrix()) - mu * z.array().log().sum();
  };

  double mu = scale / (n * m);
  const double mu_final = kLinearFinalBarrier * scale / (n * m);
  std::vector<Mat> hinv(n);
  Mat hinv_g(n, m);
  Mat grad(n, m);
  Mat dx(n, m);
  int newton = 0;
  for (;;) {
    for (int stage = 0; stage < kStageIterations && newton < options.max_newton; ++stage, ++newton) {
      Mat schur = Mat::Zero(m, m);
      Vec rhs = Vec::Zero(m);
      for (int i = 0; i < n; ++i) {
        const Vec xi = x.row(i).transpose();
        const Vec vi = v.row(i).transpose();
        const double u = vi.dot(xi);
        const double c = b[i] / (u * u);
        const Vec gi = -(b[i] / u) * vi - (mu / xi.array()).matrix();
        const Vec dinv = (xi.array().square() / mu).matrix();
        const Vec dv = (dinv.array() * vi.array()).matrix();
        const double denom = 1.0 + c * vi.dot(dv);
        Mat h = -(c / denom) * dv * dv.transpose();
        h.diagonal() += dinv;
        grad.row(i) = gi.transpose();
        hinv_g.row(i) = (h * gi).transpose();
        schur += h;
        rhs += h * gi;
        hinv[i] = std::move(h);
      }
      const Vec w = -schur.ldlt().solve(rhs);
      for (int i = 0; i < n; ++i) {
        dx.row(i) = -(hinv_g.row(i).transpose() + hinv[i] * w).transpose();
      }
      // Keep the column sums exact against roundoff in the solve.
      dx.rowwise() -= dx.colwise().sum() / n;
      const double decrement = -(grad.array() * dx.array()).sum();
      if (decrement <= kCentered * mu) break;
      double alpha = 1.0;
      for (int i = 0; i < n; ++i) {
        alpha = std::min(alpha, StepToBoundary(x.row(i).transpose(), dx.row(i).transpose()));
      }
      if (decrement > kQuadraticRegion * mu) {
        const double f0 = objective(x, mu);
        while (alpha >= kMinStep &&
               objective(x + alpha * dx, mu) > f0 - kArmijo * alpha * decrement) {
          alpha *= 0.5;
        }
        if (alpha < kMinStep) break;
      }
      x += alpha * dx;
    }
    const double mu_rel = mu * n * m / scale;
    if (mu_rel <= kPurifyFrom) {
      MarketOutcome exact = PurifyLinear(market, x, std::sqrt(mu_rel));
      if ((exact.prices.array() > 0.0).all() && CeCheck(market, exact, options.tol).pass) {
        return exact;
      }
    }
    if (mu <= mu_final) break;
    mu = std::max(mu * kBarrierShrink, mu_final);
  }

  MarketOutcome out;
  out.allocation = x;
  const Vec u = (v.array() * x.array()).rowwise().sum().matrix();
  out.prices.resize(m);
  for (int j = 0; j < m; ++j) {
    out.prices[j] = (b.array() * v.col(j).array() / u.array()).maxCoeff();
  }
  return out;
}

}  // namespace

MarketOutcome SolveCe(const FisherMarket& market, const CeOptions& options) {
  if (!(options.tol > 0.0) || options.max_newton < 1) {
    throw Error(ErrorKind::kInvalidArgument, "CE solver needs tol > 0 and max_newton >= 1");
  }
  switch (market.kind()) {
    case UtilityKind::kCobbDouglas:
      return CobbDouglasCe(market);
    case UtilityKind::kLeontief: {
      MarketOutcome out = LeontiefCe(market, options);
      const CeReport report = CeCheck(market, out, options.tol);
      if (!report.pass) FailCe("Leontief price program", report.clearing_residual);
      return out;
    }
    case UtilityKind::kLinear: {
      MarketOutcome out = LinearCe(market, options);
      const CeReport report = CeCheck(market, out, options.tol);
      if (!report.pass) {
        FailCe("linear allocation program",
               std::max(report.clearing_residual, report.optimality_gaps.cwiseAbs().maxCoeff()));
      }
      return out;
    }
  }
  throw Error(ErrorKind::kUnsupported, "unknown utility kind");
}

}  // namespace stackelberg
