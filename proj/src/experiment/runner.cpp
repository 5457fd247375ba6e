#include "stackelberg/experiment/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "stackelberg/experiment/svg.hpp"
#include "stackelberg/online.hpp"
#include "stackelberg/regret.hpp"
#include "stackelberg/solvers.hpp"
#include "stackelberg/test_games.hpp"

namespace stackelberg {

namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// "name" for scalars, "name_0", "name_1", ... otherwise.
void AddVector(Metrics& m, const std::string& name, const Vec& v) {
  if (v.size() == 1) {
    m.emplace_back(name, v[0]);
    return;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) m.emplace_back(name + "_" + std::to_string(i), v[i]);
}

void AddColumns(std::vector<std::string>& header, const std::string& name, Eigen::Index n) {
  if (n == 1) {
    header.push_back(name);
    return;
  }
  for (Eigen::Index i = 0; i < n; ++i) header.push_back(name + "_" + std::to_string(i));
}

double Mean(const std::vector<double>& d, long from, long to) {
  double s = 0.0;
  for (long t = from; t <= to; ++t) s += d[t - 1];
  return s / static_cast<double>(to - from + 1);
}

BundledGame GameByName(const std::string& name) { return name == "G1" ? MakeG1() : MakeG0(); }

RunOutput RunStackelberg(const ExperimentConfig& config, long horizon) {
  const StackelbergSpec& s = config.stackelberg;
  const BundledGame bg = GameByName(s.game);
  const Game& game = bg.game;
  const double tol = config.tolerance.value_or(kDefaultFeasibilityTol);
  const StepSchedule sx = s.schedule_x.Build(horizon);
  const StepSchedule sy = s.schedule_y.value_or(s.schedule_x).Build(horizon);

  RunOutput out;
  Metrics& m = out.record.metrics;
  std::optional<IterateTrace> trace;
  StrategyProfile avg;
  Vec lambda;
  switch (s.solver) {
    case StackelbergSolver::kMaxOracle: {
      SolverResult res = MaxOracleMirrorDescent(game, s.reg, sx, horizon, s.x0);
      avg = res.profile;
      trace.emplace(std::move(res.trace));
      break;
    }
    case StackelbergSolver::kNested: {
      NestedOptions opts;
      opts.reg_x = s.reg;
      opts.reg_y = s.reg;
      opts.inner_steps = s.inner_steps;
      SolverResult res = NestedMirrorDescentAscent(game, sx, sy, horizon, s.x0, s.y0, opts);
      avg = res.profile;
      trace.emplace(std::move(res.trace));
      break;
    }
    case StackelbergSolver::kLagrangian: {
      lambda = s.multiplier.value_or(*game.global_multiplier);
      LagrangianOptions opts;
      opts.reg = s.reg;
      opts.degeneracy_window = s.degeneracy_window;
      trace.emplace(LagrangianMirrorDescentAscent(game, lambda, sx, sy, horizon, s.x0, s.y0, opts));
      avg = trace->Average();
      break;
    }
    case StackelbergSolver::kVanilla:
      trace.emplace(VanillaGradientDescentAscent(game, sx, sy, horizon, s.x0, s.y0));
      avg = trace->Average();
      break;
  }

  AddVector(m, "x_bar", avg.x);
  AddVector(m, "y_bar", avg.y);
  const double v_bar = ValueFunction(game, avg.x);
  m.emplace_back("eps_avg", v_bar - bg.optimal_value);
  m.emplace_back("delta_avg", v_bar - ObjectiveEval(game, avg));
  Vec joint(avg.x.size() + avg.y.size());
  joint << avg.x, avg.y;
  Vec se(joint.size());
  se << bg.equilibrium.x, bg.equilibrium.y;
  m.emplace_back("distance_to_se", (joint - se).norm());
  m.emplace_back("feasible", FeasibilityCheck(game, avg, tol).feasible ? 1.0 : 0.0);

  double bound = std::nan("");
  double checked = std::nan("");
  switch (s.solver) {
    case StackelbergSolver::kMaxOracle:
    case StackelbergSolver::kNested: {
      const double regret =
          AsymmetricRegret(*trace, game, FixedComparator(bg.value_minimizer)).Regret();
      m.emplace_back("asym_regret", regret);
      if (s.check_bound) {
        if (s.schedule_x.kind != StepSchedule::Kind::kFixedHorizon) {
          throw Error(ErrorKind::kConfig, "check_bound needs a fixed-horizon schedule");
        }
        bound = s.schedule_x.scale * s.schedule_x.lipschitz * std::sqrt(2.0) /
                std::sqrt(static_cast<double>(horizon));
        checked = regret;
      }
      break;
    }
    case StackelbergSolver::kLagrangian: {
      const double residual = SaddleResidual(game, avg, lambda, bg.saddle, tol);
      m.emplace_back("saddle_residual", residual);
      m.emplace_back("regret_x", LagrangianRegret(*trace, game, lambda, Side::kX,
                                                  bg.lagrangian_x_comparator(lambda))
                                     .Regret());
      m.emplace_back("regret_y", LagrangianRegret(*trace, game, lambda, Side::kY,
                                                  bg.lagrangian_y_comparator(lambda))
                                     .Regret());
      m.emplace_back("degenerate", trace->degenerate ? 1.0 : 0.0);
      bool moved = false;
      for (const auto& r : trace->records()) {
        for (Eigen::Index i = 0; i < r.y.size(); ++i) moved = moved || r.y[i] != s.y0[i];
      }
      m.emplace_back("y_moved", moved ? 1.0 : 0.0);
      if (s.check_bound) {
        bound = 2.0 * std::sqrt(2.0) * bg.lipschitz_lagrangian * s.radius /
                std::sqrt(static_cast<double>(horizon));
        checked = residual;
      }
      break;
    }
    case StackelbergSolver::kVanilla:
      m.emplace_back("regret_x",
                     VanillaRegret(*trace, game, Side::kX, bg.vanilla_x_comparator).Regret());
      m.emplace_back("regret_y",
                     VanillaRegret(*trace, game, Side::kY, bg.vanilla_y_comparator).Regret());
      if (s.check_bound) throw Error(ErrorKind::kConfig, "the vanilla solver has no rate bound");
      break;
  }
  if (s.check_bound) {
    m.emplace_back("bound", bound);
    out.record.violations = checked > bound ? 1 : 0;
  }

  CsvTable& table = out.table;
  table.header = {"t"};
  AddColumns(table.header, "x", game.set_x.dim());
  AddColumns(table.header, "y", game.set_y.dim());
  table.header.insert(table.header.end(), {"f", "V", "eps", "delta"});
  for (const StepRecord& r : trace->records()) {
    std::vector<double> row = {static_cast<double>(r.t)};
    row.insert(row.end(), r.x.begin(), r.x.end());
    row.insert(row.end(), r.y.begin(), r.y.end());
    const double v = ValueFunction(game, r.x);
    row.insert(row.end(), {r.objective, v, v - bg.optimal_value, v - r.objective});
    table.rows.push_back(std::move(row));
  }
  return out;
}

CsvTable FisherTable(const MarketTrace& trace, const std::vector<double>& distances,
                     const std::function<FisherMarket(long)>& market_at) {
  CsvTable table;
  table.header = {"t", "distance", "clearing_residual"};
  const Eigen::Index goods = trace.empty() ? 0 : trace.front().prices.size();
  AddColumns(table.header, "p", goods);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const long t = static_cast<long>(k) + 1;
    const double residual = PriceGradient(market_at(t), trace[k].allocation).norm();
    std::vector<double> row = {static_cast<double>(t), distances[k], residual};
    row.insert(row.end(), trace[k].prices.begin(), trace[k].prices.end());
    table.rows.push_back(std::move(row));
  }
  return table;
}

MarketTrace RunDynamics(const FisherSpec& f, FisherDynamics dynamics, const MarketSequence& seq,
                        const Vec& p0, long horizon) {
  if (dynamics == FisherDynamics::kTatonnement) {
    return Tatonnement(seq, f.tatonnement.schedule.Build(horizon), p0, horizon);
  }
  const FisherMarket first = seq(1);
  const Mat x0 = f.myopic.x0 == InitialAllocation::kEqualSplit ? EqualSplitAllocation(first)
                                                                : MarketDemand(first, p0);
  MyopicOptions opts;
  opts.budget_projection = f.myopic.budget_projection;
  return MyopicBestResponse(seq, f.myopic.price_schedule.Build(horizon),
                            f.myopic.allocation_schedule.Build(horizon), p0, x0, horizon, opts);
}

RunOutput RunFisherStatic(const ExperimentConfig& config, FisherDynamics dynamics, long horizon,
                          std::uint64_t seed) {
  const FisherSpec& f = config.fisher;
  const FisherMarket& market = *f.market;
  CeOptions ce_opts;
  if (config.tolerance) ce_opts.tol = *config.tolerance;
  const MarketOutcome ce = SolveCe(market, ce_opts);
  const Vec p0 = f.p0.value_or(SampleInitialPrices(market.goods(), f.p0_range, seed));
  const MarketSequence seq = StaticSequence(market);
  const MarketTrace trace = RunDynamics(f, dynamics, seq, p0, horizon);
  std::vector<double> distances;
  distances.reserve(trace.size());
  for (const auto& step : trace) distances.push_back(DistanceToCe(step, ce).value);

  RunOutput out;
  out.table = FisherTable(trace, distances, [&](long) { return market; });
  Metrics& m = out.record.metrics;
  m.emplace_back("final_distance", distances.back());
  m.emplace_back("min_distance", *std::min_element(distances.begin(), distances.end()));
  m.emplace_back("final_clearing_residual", out.table.rows.back()[2]);
  AddVector(m, "ce_price", ce.prices);
  AddVector(m, "final_price", trace.back().prices);
  return out;
}

RunOutput RunFisherOnline(const ExperimentConfig& config, UtilityKind kind,
                          FisherDynamics dynamics, long horizon, std::uint64_t seed) {
  const FisherSpec& f = config.fisher;
  const MarketRanges& ranges = dynamics == FisherDynamics::kTatonnement ? f.tatonnement.ranges
                                                                         : f.myopic.ranges;
  const MarketSequence seq = OnlineSequence(kind, f.buyers, f.goods, ranges, seed);
  CeOptions ce_opts;
  if (config.tolerance) ce_opts.tol = *config.tolerance;
  const std::vector<MarketOutcome> eq = EquilibriumSequence(seq, horizon, ce_opts);
  const Vec p0 = f.p0.value_or(SampleInitialPrices(f.goods, f.p0_range, seed));
  const MarketTrace trace = RunDynamics(f, dynamics, seq, p0, horizon);
  const std::vector<double> distances = DistanceSeries(trace, eq);

  RunOutput out;
  out.table = FisherTable(trace, distances, seq);
  Metrics& m = out.record.metrics;
  const double early = Mean(distances, f.early_from, f.early_to);
  const double late = Mean(distances, f.late_from, f.late_to);
  m.emplace_back("early_mean", early);
  m.emplace_back("late_mean", late);
  m.emplace_back("improved", late < early ? 1.0 : 0.0);
  m.emplace_back("mean_distance", Mean(distances, 1, horizon));
  m.emplace_back("final_distance", distances.back());
  return out;
}

constexpr double kRatioFloor = 1e-9;

RunOutput RunRobustness(const ExperimentConfig& config, const RobustnessPair& pair, double drift,
                        long horizon, std::uint64_t seed) {
  const RobustnessSpec& r = config.robustness;
  QuadraticSaddleConfig qc;
  qc.dim_x = r.dim_x;
  qc.dim_y = r.dim_y;
  qc.mu_x = pair.mu;
  qc.mu_y = r.mu_y.value_or(pair.smoothness);
  qc.smoothness = pair.smoothness;
  qc.coupling = r.coupling;
  qc.drift = drift;
  qc.horizon = horizon;
  qc.seed = seed;
  qc.center_scale = r.center_scale;
  const QuadraticSaddleSequence seq(qc);
  const double big_l = seq.smoothness();
  const bool symmetric = config.kind == ExperimentKind::kRobustnessSym;
  const RobustnessReport report =
      symmetric ? RunSymTracking(seq, r.eta_fraction * 2.0 / (seq.mu_x() + big_l),
                                 r.eta_fraction * 2.0 / (seq.mu_y() + big_l),
                                 Vec::Zero(seq.dim_x()), Vec::Zero(seq.dim_y()))
                : RunAsymTracking(seq, r.eta_fraction * 2.0 / (seq.mu_x() + big_l),
                                  Vec::Zero(seq.dim_x()));

  RunOutput out;
  out.table.header = {"t", "dist_x", "dist_y", "bound_sum", "bound_simple"};
  double max_dist = 0.0;
  double ratio_sum = 0.0;
  double ratio_simple = 0.0;
  for (const RobustnessStep& s : report.steps) {
    out.table.rows.push_back(
        {static_cast<double>(s.t), s.dist_x, s.dist_y, s.bound_sum, s.bound_simple});
    const double measured = s.dist_x + s.dist_y;
    max_dist = std::max(max_dist, measured);
    // Distances are differences of O(1) coordinates, so ratios against tiny
    // bounds only show roundoff.
    if (s.bound_sum > kRatioFloor) ratio_sum = std::max(ratio_sum, measured / s.bound_sum);
    if (s.bound_simple > kRatioFloor) {
      ratio_simple = std::max(ratio_simple, measured / s.bound_simple);
    }
  }
  Metrics& m = out.record.metrics;
  m.emplace_back("delta", report.delta);
  m.emplace_back("drift_used", report.drift);
  m.emplace_back("init_distance", report.init_x + report.init_y);
  m.emplace_back("max_distance", max_dist);
  m.emplace_back("final_distance", report.steps.back().dist_x + report.steps.back().dist_y);
  m.emplace_back("max_ratio_sum", ratio_sum);
  m.emplace_back("max_ratio_simple", ratio_simple);
  m.emplace_back("violations_sum", static_cast<double>(report.violations_sum));
  m.emplace_back("violations_simple", static_cast<double>(report.violations_simple));
  out.record.violations = report.violations_sum + report.violations_simple;
  return out;
}

BundledLosses LossesByName(const std::string& name, long horizon, std::uint64_t seed) {
  if (name == "box-linear") return MakeBoxLinearLosses(horizon, seed);
  if (name == "box-quadratic") return MakeBoxQuadraticLosses(horizon, seed);
  if (name == "simplex-linear") return MakeSimplexLinearLosses(horizon, seed);
  throw Error(ErrorKind::kConfig, "unknown loss sequence '" + name + "'");
}

RunOutput RunRegret(const std::string& name, long horizon, std::uint64_t seed) {
  const BundledLosses seq = LossesByName(name, horizon, seed);
  const IterateTrace trace =
      OnlineMirrorDescent(seq.gradient, seq.reg, seq.set,
                          StepSchedule::FixedHorizon(seq.c, seq.lipschitz, horizon), horizon,
                          seq.x0);
  const RegretLedger ledger =
      OnlineRegret(trace, seq.x0, seq.loss, FixedComparator(seq.best_action));
  const double bound = OmdRegretBound(seq.c, seq.lipschitz, horizon);

  RunOutput out;
  Metrics& m = out.record.metrics;
  m.emplace_back("regret", ledger.Regret());
  m.emplace_back("bound", bound);
  m.emplace_back("ratio", ledger.Regret() / bound);
  out.record.violations = ledger.Regret() > bound ? 1 : 0;

  out.table.header = {"t"};
  AddColumns(out.table.header, "x", seq.x0.size());
  out.table.header.push_back("loss");
  // Round t plays the iterate before the t-th update.
  Vec played = seq.x0;
  for (const StepRecord& r : trace.records()) {
    std::vector<double> row = {static_cast<double>(r.t)};
    row.insert(row.end(), played.begin(), played.end());
    row.push_back(seq.loss(r.t, played));
    out.table.rows.push_back(std::move(row));
    played = r.x;
  }
  return out;
}

std::string JobLabel(const std::string& variant, long horizon, std::uint64_t seed) {
  return variant + "_T" + std::to_string(horizon) + "_seed" + std::to_string(seed);
}

// Trace columns drawn by --plot.
std::vector<std::string> PlotColumns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kStackelbergSolve:
      return {"eps"};
    case ExperimentKind::kFisherStatic:
    case ExperimentKind::kFisherOnline:
      return {"distance"};
    case ExperimentKind::kRobustnessAsym:
    case ExperimentKind::kRobustnessSym:
      return {"dist_x", "dist_y", "bound_simple"};
    case ExperimentKind::kRegretReport:
      return {"loss"};
  }
  return {};
}

constexpr std::size_t kPlotSeeds = 5;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
}

nlohmann::ordered_json MetricsJson(const Metrics& metrics) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, value] : metrics) {
    if (std::isfinite(value)) {
      j[name] = value;
    } else {
      j[name] = nullptr;
    }
  }
  return j;
}

}  // namespace

double RunRecord::Metric(std::string_view name) const {
  for (const auto& [key, value] : metrics) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::kInvalidArgument, "run has no metric '" + std::string(name) + "'");
}

double Aggregate::Mean(std::string_view name) const {
  for (const auto& [key, value] : means) {
    if (key == name) return value;
  }
  throw Error(ErrorKind::kInvalidArgument, "aggregate has no metric '" + std::string(name) + "'");
}

const Aggregate& RunSummary::Find(std::string_view variant, long horizon) const {
  for (const Aggregate& a : aggregates) {
    if (a.variant == variant && a.horizon == horizon) return a;
  }
  throw Error(ErrorKind::kInvalidArgument,
              "no aggregate for " + std::string(variant) + " at T=" + std::to_string(horizon));
}

std::vector<std::string> Variants(const ExperimentConfig& config) {
  std::vector<std::string> out;
  switch (config.kind) {
    case ExperimentKind::kStackelbergSolve:
      out.push_back(ToString(config.stackelberg.solver));
      break;
    case ExperimentKind::kFisherStatic:
      for (FisherDynamics d : config.fisher.dynamics) out.push_back(ToString(d));
      break;
    case ExperimentKind::kFisherOnline:
      for (UtilityKind u : config.fisher.utilities) {
        for (FisherDynamics d : config.fisher.dynamics) {
          out.push_back(std::string(ToString(u)) + "-" + ToString(d));
        }
      }
      break;
    case ExperimentKind::kRobustnessAsym:
    case ExperimentKind::kRobustnessSym:
      for (const RobustnessPair& p : config.robustness.pairs) {
        for (double d : config.robustness.drifts) {
          out.push_back("mu" + Num(p.mu) + "-L" + Num(p.smoothness) + "-d" + Num(d));
        }
      }
      break;
    case ExperimentKind::kRegretReport:
      out = config.regret.losses;
      break;
  }
  return out;
}

RunOutput RunJob(const ExperimentConfig& config, std::size_t variant, long horizon,
                 std::uint64_t seed) {
  RunOutput out;
  switch (config.kind) {
    case ExperimentKind::kStackelbergSolve:
      out = RunStackelberg(config, horizon);
      break;
    case ExperimentKind::kFisherStatic:
      out = RunFisherStatic(config, config.fisher.dynamics.at(variant), horizon, seed);
      break;
    case ExperimentKind::kFisherOnline: {
      const std::size_t nd = config.fisher.dynamics.size();
      out = RunFisherOnline(config, config.fisher.utilities.at(variant / nd),
                            config.fisher.dynamics.at(variant % nd), horizon, seed);
      break;
    }
    case ExperimentKind::kRobustnessAsym:
    case ExperimentKind::kRobustnessSym: {
      const std::size_t nd = config.robustness.drifts.size();
      out = RunRobustness(config, config.robustness.pairs.at(variant / nd),
                          config.robustness.drifts.at(variant % nd), horizon, seed);
      break;
    }
    case ExperimentKind::kRegretReport:
      out = RunRegret(config.regret.losses.at(variant), horizon, seed);
      break;
  }
  out.record.variant = Variants(config).at(variant);
  out.record.horizon = horizon;
  out.record.seed = seed;
  return out;
}

RunSummary RunExperiment(const ExperimentConfig& config, const RunnerOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::string> variants = Variants(config);
  struct Job {
    std::size_t variant;
    long horizon;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (long h : config.horizons) {
      for (std::uint64_t s : config.seeds) jobs.push_back({v, h, s});
    }
  }

  const std::filesystem::path dir(config.output_dir);
  if (options.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  }

  // Workers fill slots; this thread collects them in job order and is the
  // only one touching the file system.
  std::vector<std::optional<RunOutput>> slots(jobs.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      const Job& job = jobs[k];
      const auto t0 = std::chrono::steady_clock::now();
      RunOutput out;
      try {
        out = RunJob(config, job.variant, job.horizon, job.seed);
      } catch (const std::exception& e) {
        out = RunOutput{};
        out.record.variant = variants[job.variant];
        out.record.horizon = job.horizon;
        out.record.seed = job.seed;
        out.record.error = "seed " + std::to_string(job.seed) + ", " + variants[job.variant] +
                           ", T=" + std::to_string(job.horizon) + ": " + e.what();
      }
      out.record.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      {
        std::lock_guard lock(mutex);
        slots[k] = std::move(out);
      }
      ready.notify_all();
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);

  RunSummary summary;
  summary.kind = config.kind;
  std::map<std::pair<std::size_t, long>, std::vector<Series>> plots;
  std::string first_error;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    RunOutput out;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return slots[k].has_value(); });
      out = std::move(*slots[k]);
      slots[k].reset();
    }
    RunRecord& record = out.record;
    if (options.write_files && record.error.empty()) {
      const std::filesystem::path path =
          dir / (JobLabel(record.variant, record.horizon, record.seed) + ".csv");
      try {
        SaveCsv(path.string(), out.table);
        record.csv_path = path.string();
      } catch (const Error& e) {
        record.error = e.what();
      }
    }
    if (config.plot && record.error.empty()) {
      auto& series = plots[{jobs[k].variant, jobs[k].horizon}];
      if (series.size() < kPlotSeeds * PlotColumns(config.kind).size()) {
        for (const std::string& column : PlotColumns(config.kind)) {
          Series s;
          s.name = column + " seed " + std::to_string(record.seed);
          const std::size_t c = out.table.Column(column);
          for (const auto& row : out.table.rows) {
            s.x.push_back(row[0]);
            s.y.push_back(row[c]);
          }
          series.push_back(std::move(s));
        }
      }
    }
    if (options.progress) options.progress(record);
    summary.violations += record.violations;
    summary.errors += record.error.empty() ? 0 : 1;
    summary.runs.push_back(std::move(record));
  }
  for (auto& t : pool) t.join();

  for (std::size_t v = 0; v < variants.size(); ++v) {
    for (long h : config.horizons) {
      Aggregate a;
      a.variant = variants[v];
      a.horizon = h;
      std::map<std::string, double> sums;
      for (const RunRecord& r : summary.runs) {
        if (r.variant != a.variant || r.horizon != h) continue;
        ++a.runs;
        a.violations += r.violations;
        if (!r.error.empty()) {
          ++a.failed;
          continue;
        }
        if (a.means.empty()) {
          for (const auto& [name, value] : r.metrics) a.means.emplace_back(name, 0.0);
        }
        for (const auto& [name, value] : r.metrics) sums[name] += value;
      }
      const long ok = a.runs - a.failed;
      for (auto& [name, value] : a.means) value = ok > 0 ? sums[name] / ok : std::nan("");
      summary.aggregates.push_back(std::move(a));
    }
  }

  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_files) {
    WriteText(dir / "summary.json", SummaryJson(summary));
    for (const auto& [key, series] : plots) {
      ChartOptions chart;
      chart.title = variants[key.first] + ", T = " + std::to_string(key.second);
      chart.y_label = PlotColumns(config.kind).front();
      WriteText(dir / (variants[key.first] + "_T" + std::to_string(key.second) + ".svg"),
                RenderLineChart(series, chart));
    }
  }
  return summary;
}

std::string SummaryJson(const RunSummary& summary) {
  nlohmann::ordered_json j;
  j["kind"] = ToString(summary.kind);
  j["ok"] = summary.ok();
  j["violations"] = summary.violations;
  j["errors"] = summary.errors;
  j["seconds"] = summary.seconds;
  j["aggregates"] = nlohmann::ordered_json::array();
  for (const Aggregate& a : summary.aggregates) {
    nlohmann::ordered_json e;
    e["variant"] = a.variant;
    e["horizon"] = a.horizon;
    e["runs"] = a.runs;
    e["failed"] = a.failed;
    e["violations"] = a.violations;
    e["means"] = MetricsJson(a.means);
    j["aggregates"].push_back(std::move(e));
  }
  j["runs"] = nlohmann::ordered_json::array();
  for (const RunRecord& r : summary.runs) {
    nlohmann::ordered_json e;
    e["variant"] = r.variant;
    e["horizon"] = r.horizon;
    e["seed"] = r.seed;
    e["violations"] = r.violations;
    e["seconds"] = r.seconds;
    if (!r.error.empty()) e["error"] = r.error;
    if (!r.csv_path.empty()) e["csv"] = r.csv_path;
    e["metrics"] = MetricsJson(r.metrics);
    j["runs"].push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string SummaryText(const RunSummary& summary) {
  std::ostringstream os;
  os << ToString(summary.kind) << ": " << summary.runs.size() << " runs, " << summary.violations
     << " violations, " << summary.errors << " errors, " << Num(summary.seconds) << " s\n";
  for (const Aggregate& a : summary.aggregates) {
    os << "  " << a.variant << " T=" << a.horizon << " runs=" << a.runs;
    if (a.failed) os << " failed=" << a.failed;
    if (a.violations) os << " violations=" << a.violations;
    for (const auto& [name, value] : a.means) os << " " << name << "=" << Num(value);
    os << "\n";
  }
  for (const RunRecord& r : summary.runs) {
    if (!r.error.empty()) os << "  error: " << r.error << "\n";
  }
  return os.str();
}

}  // namespace stackelberg
