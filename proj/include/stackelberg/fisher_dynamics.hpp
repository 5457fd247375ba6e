#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "stackelberg/fisher.hpp"
#include "stackelberg/mirror.hpp"

namespace stackelberg {

struct UniformRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct MarketRanges {
  UniformRange budget;
  UniformRange valuation;
  UniformRange supply;
};

// Ranges used for the online tâtonnement runs: b ~ U[10,20], v ~ U[5,15],
// s ~ U[100,110].
MarketRanges TatonnementRanges();
// Ranges used for the online myopic best-response runs: b ~ U[10,15],
// v ~ U[10,20], s ~ U[10,15].
MarketRanges MyopicRanges();

// Throws kInvalidArgument unless 0 < lo <= hi for every range.
void ValidateRanges(const MarketRanges& ranges);

// Range of the random initial prices, p0 ~ U[5, 55].
UniformRange InitialPriceRange();

// Stream index reserved for initial prices; markets use streams 1, 2, ...
inline constexpr std::uint64_t kInitialPriceStream = std::uint64_t{1} << 20;

// p0_j ~ U[range] drawn from Rng(seed, kInitialPriceStream).
Vec SampleInitialPrices(int goods, const UniformRange& range, std::uint64_t seed);

// Market t (1-based) of the online sequence for `seed`. Deterministic in
// (seed, t): the draws come from the stream Rng(seed, t), budgets first, then
// valuations row by row, then supplies.
FisherMarket SampleOnlineMarket(UtilityKind kind, int buyers, int goods,
                                const MarketRanges& ranges, std::uint64_t seed, long t);

// Market faced at step t (1-based).
using MarketSequence = std::function<FisherMarket(long t)>;

MarketSequence StaticSequence(FisherMarket market);
MarketSequence OnlineSequence(UtilityKind kind, int buyers, int goods, MarketRanges ranges,
                              std::uint64_t seed);

// Entry t-1 holds (p_t, X_t).
using MarketTrace = std::vector<MarketOutcome>;

// Per step: X_t is the demand at p_{t-1} (floored at kPriceFloor) under
// market t, then p_t = max(0, p_{t-1} - eta_t (s_t - sum_i x_i)).
MarketTrace Tatonnement(const MarketSequence& markets, const StepSchedule& schedule,
                        const Vec& p0, long horizon);

struct MyopicOptions {
  // Also project each allocation row onto the budget set {x >= 0 : x . p <= b_i}
  // at the prices the buyer faced.
  bool budget_projection = false;
  AlternatingProjectionOptions projection;
};

// Simultaneous projected gradient steps under market t:
//   p_t = max(0, p_{t-1} - eta^p_t (s_t - sum_i x_{i,t-1}))
//   x_{i,t} = max(0, x_{i,t-1} + eta^x_t ((b_i / u_i) grad u_i - p_{t-1}))
// with utilities and gradients evaluated at x_{i,t-1}. A buyer whose utility
// reaches zero has no gradient; the error names the buyer and the step.
MarketTrace MyopicBestResponse(const MarketSequence& markets, const StepSchedule& price_schedule,
                               const StepSchedule& allocation_schedule, const Vec& p0,
                               const Mat& x0, long horizon, const MyopicOptions& options = {});

// Every buyer gets s_j / n of good j.
Mat EqualSplitAllocation(const FisherMarket& market);

// distance_to_ce of trace entry t-1 against the equilibrium of market t.
std::vector<double> DistanceSeries(const MarketTrace& trace,
                                   const std::vector<MarketOutcome>& equilibria);

// Equilibria of markets 1..horizon.
std::vector<MarketOutcome> EquilibriumSequence(const MarketSequence& markets, long horizon,
                                               const CeOptions& options = {});

}  // namespace stackelberg
