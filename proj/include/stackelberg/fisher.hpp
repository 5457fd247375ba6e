#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stackelberg/game.hpp"

namespace stackelberg {

enum class UtilityKind { kLinear, kCobbDouglas, kLeontief };

const char* ToString(UtilityKind kind);
// Accepts "linear", "cobb-douglas" and "leontief".
UtilityKind ParseUtilityKind(std::string_view name);

// Prices below this are raised to it before demand is evaluated.
inline constexpr double kPriceFloor = 1e-9;
// Allocations are clamped to this before Cobb-Douglas logs and divisions.
inline constexpr double kAllocationFloor = 1e-12;
// Goods within this relative distance of the best bang-per-buck tie.
inline constexpr double kLinearTieTol = 1e-9;

// n buyers, m goods. Valuations are n x m with row i describing buyer i;
// every entry of valuations, budgets and supplies must be strictly positive.
// Cobb-Douglas rows are normalized to sum 1 on construction.
class FisherMarket {
 public:
  FisherMarket(UtilityKind kind, Mat valuations, Vec budgets, Vec supplies);

  UtilityKind kind() const { return kind_; }
  int buyers() const { return static_cast<int>(valuations_.rows()); }
  int goods() const { return static_cast<int>(valuations_.cols()); }
  const Mat& valuations() const { return valuations_; }
  const Vec& budgets() const { return budgets_; }
  const Vec& supplies() const { return supplies_; }

 private:
  UtilityKind kind_;
  Mat valuations_;
  Vec budgets_;
  Vec supplies_;
};

struct MarketOutcome {
  Vec prices;      // m
  Mat allocation;  // n x m, row i is buyer i's bundle
};

// linear: v . x; Cobb-Douglas: prod_j x_j^{v_j}; Leontief: min_j x_j / v_j.
double UtilityEval(UtilityKind kind, const Vec& v, const Vec& x);

// Gradient of the utility (a supergradient for Leontief: (1/v_k) e_k at the
// lowest index k attaining the minimum ratio). Cobb-Douglas clamps x at
// kAllocationFloor.
Vec UtilitySubgradient(UtilityKind kind, const Vec& v, const Vec& x);

// Utility-maximizing bundle of a buyer with budget b at prices p > 0. Linear
// demand splits the budget equally over the bang-per-buck maximizers.
Vec Demand(UtilityKind kind, const Vec& v, double budget, const Vec& prices);

// Demand of every buyer, with prices floored at kPriceFloor first.
Mat MarketDemand(const FisherMarket& market, const Vec& prices);

// s . p + sum_i b_i log u_i(demand_i(p)).
double EgValue(const FisherMarket& market, const Vec& prices);

// s - sum_i x_i.
Vec PriceGradient(const FisherMarket& market, const Mat& allocation);

// Row i: (b_i / u_i(x_i)) grad u_i(x_i) - p.
Mat AllocationGradient(const FisherMarket& market, const Vec& prices, const Mat& allocation);

struct CeReport {
  // max_j of |sum_i x_ij - s_j| for priced goods and max(0, sum_i x_ij - s_j)
  // for free ones.
  double clearing_residual = 0.0;
  // u_i(demand_i(p)) - u_i(x_i), per buyer.
  Vec optimality_gaps;
  // max(0, x_i . p - b_i), per buyer.
  Vec budget_violations;
  bool pass = false;
};

// Checks the competitive-equilibrium conditions. Demand is evaluated at prices
// floored at kPriceFloor except for Leontief buyers, whose demand is finite
// at zero prices. Clearing is measured
// relative to max(1, s_j), optimality gaps relative to max(1, u_i(demand)) and
// budgets relative to max(1, b_i); pass requires all three within tol and
// gaps >= -tol.
CeReport CeCheck(const FisherMarket& market, const MarketOutcome& outcome,
                 double tol = 1e-8);

struct CeOptions {
  double tol = 1e-9;
  int max_newton = 500;  // total Newton steps over all barrier stages
};

// Competitive equilibrium. Cobb-Douglas uses the closed form
// p_j = sum_i b_i v_ij / s_j. Leontief minimizes the convex price program
// s . p - sum_i b_i log(v_i . p) by a barrier Newton method; linear solves the
// Eisenberg-Gale allocation program max sum_i b_i log(v_i . x_i) subject to
// column sums s by an equality-constrained barrier Newton method and prices
// goods at max_i b_i v_ij / u_i. Linear and Leontief results must pass
// CeCheck at options.tol; otherwise NonConvergenceError.
MarketOutcome SolveCe(const FisherMarket& market, const CeOptions& options = {});

struct DistanceReport {
  double value = 0.0;
  // Some column of either allocation summed to zero and was left out.
  bool skipped_column = false;
};

// ||p* - p||_2 + ||N(X*) - N(X)||_F, where N scales every column to sum 1.
DistanceReport DistanceToCe(const MarketOutcome& outcome, const MarketOutcome& equilibrium);

// The market as a min-max Stackelberg game: x = prices on the orthant,
// y = row-major allocation on the orthant, g_i = b_i - x_i . p, objective
// s . p + sum_i b_i log u_i(x_i). Ships demand as best response and the
// all-ones KKT multiplier.
Game FisherGame(const FisherMarket& market);

Vec FlattenAllocation(const Mat& allocation);
Mat UnflattenAllocation(const Vec& flat, int buyers, int goods);

}  // namespace stackelberg
