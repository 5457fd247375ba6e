#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stackelberg/fisher.hpp"
#include "stackelberg/fisher_dynamics.hpp"
#include "stackelberg/mirror.hpp"

namespace stackelberg {

enum class ExperimentKind {
  kStackelbergSolve,
  kFisherStatic,
  kFisherOnline,
  kRobustnessAsym,
  kRobustnessSym,
  kRegretReport,
};

const char* ToString(ExperimentKind kind);
// Throws kConfig for unknown names.
ExperimentKind ParseExperimentKind(std::string_view name);

// A learning-rate rule whose fixed-horizon form is resolved per run.
struct ScheduleSpec {
  StepSchedule::Kind kind = StepSchedule::Kind::kInverseSqrt;
  // eta (constant), a (inverse-sqrt) or c (fixed-horizon).
  double scale = 1.0;
  // L of the fixed-horizon rule eta = c / (L sqrt(2T)).
  double lipschitz = 1.0;

  StepSchedule Build(long horizon) const;
};

enum class StackelbergSolver { kMaxOracle, kNested, kLagrangian, kVanilla };

const char* ToString(StackelbergSolver solver);

struct StackelbergSpec {
  std::string game = "G0";
  StackelbergSolver solver = StackelbergSolver::kMaxOracle;
  Regularizer reg = Regularizer::kEuclidean;
  ScheduleSpec schedule_x{StepSchedule::Kind::kFixedHorizon, 1.0, 3.0};
  // Defaults to schedule_x.
  std::optional<ScheduleSpec> schedule_y;
  Vec x0 = Vec::Constant(1, 1.0);
  Vec y0 = Vec::Constant(1, 0.0);
  long inner_steps = 1;
  // Lagrangian solver only; defaults to the game's global multiplier.
  std::optional<Vec> multiplier;
  long degeneracy_window = 100;
  // Count a violation when the rate bound of the solver is exceeded:
  // asymmetric regret <= c L sqrt(2/T) for the max-oracle and nested solvers,
  // saddle residual <= 2 sqrt(2) L radius / sqrt(T) for the Lagrangian one.
  bool check_bound = false;
  double radius = 1.0;
};

enum class FisherDynamics { kTatonnement, kMyopic };

const char* ToString(FisherDynamics dynamics);

enum class InitialAllocation { kEqualSplit, kDemand };

struct TatonnementSpec {
  ScheduleSpec schedule{StepSchedule::Kind::kInverseSqrt, 1.0, 1.0};
  MarketRanges ranges = TatonnementRanges();
};

struct MyopicSpec {
  ScheduleSpec price_schedule{StepSchedule::Kind::kInverseSqrt, 5.0, 1.0};
  ScheduleSpec allocation_schedule{StepSchedule::Kind::kInverseSqrt, 0.01, 1.0};
  MarketRanges ranges = MyopicRanges();
  InitialAllocation x0 = InitialAllocation::kEqualSplit;
  bool budget_projection = false;
};

struct FisherSpec {
  std::vector<UtilityKind> utilities = {UtilityKind::kLinear, UtilityKind::kCobbDouglas,
                                        UtilityKind::kLeontief};
  std::vector<FisherDynamics> dynamics = {FisherDynamics::kTatonnement, FisherDynamics::kMyopic};
  // Static markets: given inline or loaded from a market file.
  std::optional<FisherMarket> market;
  int buyers = 5;
  int goods = 8;
  // Explicit initial prices; otherwise drawn from p0_range per seed.
  std::optional<Vec> p0;
  UniformRange p0_range = InitialPriceRange();
  // Inclusive step windows whose mean distances are reported.
  long early_from = 1;
  long early_to = 100;
  long late_from = 500;
  long late_to = 1000;
  TatonnementSpec tatonnement;
  MyopicSpec myopic;
};

struct RobustnessPair {
  double mu = 1.0;
  double smoothness = 1.0;
};

struct RobustnessSpec {
  // (mu, L) pairs; each runs with mu_x = mu and mu_y = L unless mu_y is set.
  std::vector<RobustnessPair> pairs = {{1.0, 1.0}, {1.0, 4.0}, {0.5, 2.0}};
  std::vector<double> drifts = {0.0, 0.1, 1.0};
  std::optional<double> mu_y;
  int dim_x = 2;
  int dim_y = 2;
  Mat coupling;
  double center_scale = 1.0;
  // Learning rates as fractions of their ceilings 2/(mu + L).
  double eta_fraction = 1.0;
};

struct RegretSpec {
  std::vector<std::string> losses = {"box-linear", "box-quadratic", "simplex-linear"};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kStackelbergSolve;
  std::vector<long> horizons = {1000};
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir;
  bool plot = false;
  // CE solver tolerance (Fisher kinds) or feasibility tolerance (Stackelberg).
  std::optional<double> tolerance;
  // Worker threads; 0 picks the hardware concurrency.
  int threads = 0;

  StackelbergSpec stackelberg;
  FisherSpec fisher;
  RobustnessSpec robustness;
  RegretSpec regret;
};

// Parses and validates a YAML config. `base_dir` resolves relative market
// files. Every problem found is reported in one kConfig error, one line
// each, prefixed by the source name and line number where known.
ExperimentConfig ParseConfig(std::string_view text, std::string_view source_name = "<config>",
                             const std::string& base_dir = ".");

// Reads and parses a config file; kIo when it cannot be read.
ExperimentConfig LoadConfig(const std::string& path);

}  // namespace stackelberg
