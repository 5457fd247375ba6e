#include "stackelberg/fisher_dynamics.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "stackelberg/rng.hpp"

namespace stackelberg {

namespace {

void RequireHorizon(long horizon) {
  if (horizon < 1) throw Error(ErrorKind::kInvalidArgument, "horizon must be at least 1");
}

void RequirePrices(const Vec& p0, int goods) {
  if (p0.size() != goods) {
    std::ostringstream os;
    os << "initial prices have length " << p0.size() << ", market has " << goods << " goods";
    throw Error(ErrorKind::kDimensionMismatch, os.str());
  }
  if ((p0.array() < 0.0).any() || !p0.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "initial prices must be finite and nonnegative");
  }
}

// Rethrows an error raised at step t with the step attached.
[[noreturn]] void RethrowAtStep(const Error& e, long t) {
  std::ostringstream os;
  os << "step " << t << ": " << e.what();
  throw Error(e.kind(), os.str());
}

}  // namespace

MarketRanges TatonnementRanges() { return {{10.0, 20.0}, {5.0, 15.0}, {100.0, 110.0}}; }

MarketRanges MyopicRanges() { return {{10.0, 15.0}, {10.0, 20.0}, {10.0, 15.0}}; }

void ValidateRanges(const MarketRanges& ranges) {
  for (const auto& [range, name] : {std::pair{ranges.budget, "budget"},
                                    std::pair{ranges.valuation, "valuation"},
                                    std::pair{ranges.supply, "supply"}}) {
    if (!(range.lo > 0.0) || !(range.lo <= range.hi)) {
      std::ostringstream os;
      os << name << " range [" << range.lo << ", " << range.hi << "] needs 0 < lo <= hi";
      throw Error(ErrorKind::kInvalidArgument, os.str());
    }
  }
}

UniformRange InitialPriceRange() { return {5.0, 55.0}; }

Vec SampleInitialPrices(int goods, const UniformRange& range, std::uint64_t seed) {
  if (goods < 1) throw Error(ErrorKind::kInvalidArgument, "need at least one good");
  if (!(range.lo >= 0.0) || !(range.lo <= range.hi) || !std::isfinite(range.hi)) {
    throw Error(ErrorKind::kInvalidArgument, "initial price range needs 0 <= lo <= hi");
  }
  Rng rng(seed, kInitialPriceStream);
  Vec p(goods);
  for (int j = 0; j < goods; ++j) p[j] = rng.Uniform(range.lo, range.hi);
  return p;
}

FisherMarket SampleOnlineMarket(UtilityKind kind, int buyers, int goods,
                                const MarketRanges& ranges, std::uint64_t seed, long t) {
  ValidateRanges(ranges);
  if (buyers < 1 || goods < 1) {
    throw Error(ErrorKind::kInvalidArgument, "market needs at least one buyer and one good");
  }
  if (t < 1) throw Error(ErrorKind::kInvalidArgument, "market index is 1-based");
  Rng rng(seed, static_cast<std::uint64_t>(t));
  Vec b(buyers);
  Mat v(buyers, goods);
  Vec s(goods);
  for (int i = 0; i < buyers; ++i) b[i] = rng.Uniform(ranges.budget.lo, ranges.budget.hi);
  for (int i = 0; i < buyers; ++i) {
    for (int j = 0; j < goods; ++j) v(i, j) = rng.Uniform(ranges.valuation.lo, ranges.valuation.hi);
  }
  for (int j = 0; j < goods; ++j) s[j] = rng.Uniform(ranges.supply.lo, ranges.supply.hi);
  return FisherMarket(kind, std::move(v), std::move(b), std::move(s));
}

MarketSequence StaticSequence(FisherMarket market) {
  return [market = std::move(market)](long) { return market; };
}

MarketSequence OnlineSequence(UtilityKind kind, int buyers, int goods, MarketRanges ranges,
                              std::uint64_t seed) {
  ValidateRanges(ranges);
  return [=](long t) { return SampleOnlineMarket(kind, buyers, goods, ranges, seed, t); };
}

MarketTrace Tatonnement(const MarketSequence& markets, const StepSchedule& schedule,
                        const Vec& p0, long horizon) {
  RequireHorizon(horizon);
  MarketTrace trace;
  trace.reserve(horizon);
  Vec p = p0;
  for (long t = 1; t <= horizon; ++t) {
    const FisherMarket market = markets(t);
    if (t == 1) RequirePrices(p0, market.goods());
    MarketOutcome step;
    try {
      step.allocation = MarketDemand(market, p);
    } catch (const Error& e) {
      RethrowAtStep(e, t);
    }
    const Vec excess = PriceGradient(market, step.allocation);
    p = (p - schedule(t) * excess).cwiseMax(0.0);
    step.prices = p;
    trace.push_back(std::move(step));
  }
  return trace;
}

MarketTrace MyopicBestResponse(const MarketSequence& markets, const StepSchedule& price_schedule,
                               const StepSchedule& allocation_schedule, const Vec& p0,
                               const Mat& x0, long horizon, const MyopicOptions& options) {
  RequireHorizon(horizon);
  if ((x0.array() < 0.0).any() || !x0.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "initial allocation must be finite and nonnegative");
  }
  MarketTrace trace;
  trace.reserve(horizon);
  Vec p = p0;
  Mat x = x0;
  for (long t = 1; t <= horizon; ++t) {
    const FisherMarket market = markets(t);
    if (t == 1) {
      RequirePrices(p0, market.goods());
      if (x0.rows() != market.buyers() || x0.cols() != market.goods()) {
        throw Error(ErrorKind::kDimensionMismatch, "initial allocation shape does not match the market");
      }
    }
    Mat grad_x;
    try {
      grad_x = AllocationGradient(market, p, x);
    } catch (const Error& e) {
      RethrowAtStep(e, t);
    }
    const Vec grad_p = PriceGradient(market, x);
    Mat next_x = (x + allocation_schedule(t) * grad_x).cwiseMax(0.0);
    if (options.budget_projection && p.squaredNorm() > 0.0) {
      for (int i = 0; i < market.buyers(); ++i) {
        const Halfspace budget{p, market.budgets()[i]};
        try {
          next_x.row(i) = AlternatingProject(std::span(&budget, 1), true,
                                             next_x.row(i).transpose(), options.projection)
                              .transpose();
        } catch (const Error& e) {
          RethrowAtStep(e, t);
        }
      }
    }
    p = (p - price_schedule(t) * grad_p).cwiseMax(0.0);
    x = std::move(next_x);
    trace.push_back({p, x});
  }
  return trace;
}

Mat EqualSplitAllocation(const FisherMarket& market) {
  return Vec::Ones(market.buyers()) * market.supplies().transpose() / market.buyers();
}

std::vector<double> DistanceSeries(const MarketTrace& trace,
                                   const std::vector<MarketOutcome>& equilibria) {
  if (trace.size() > equilibria.size()) {
    throw Error(ErrorKind::kDimensionMismatch, "fewer equilibria than trace steps");
  }
  std::vector<double> out;
  out.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out.push_back(DistanceToCe(trace[k], equilibria[k]).value);
  }
  return out;
}

std::vector<MarketOutcome> EquilibriumSequence(const MarketSequence& markets, long horizon,
                                               const CeOptions& options) {
  RequireHorizon(horizon);
  std::vector<MarketOutcome> out;
  out.reserve(horizon);
  for (long t = 1; t <= horizon; ++t) {
    try {
      out.push_back(SolveCe(markets(t), options));
    } catch (const NonConvergenceError& e) {
      std::ostringstream os;
      os << "market " << t << ": " << e.what();
      throw NonConvergenceError(os.str(), e.residual());
    }
  }
  return out;
}

}  // namespace stackelberg
