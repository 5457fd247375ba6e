#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stackelberg/experiment/config.hpp"
#include "stackelberg/experiment/csv.hpp"

namespace stackelberg {

using Metrics = std::vector<std::pair<std::string, double>>;

// Outcome of one (variant, horizon, seed) job.
struct RunRecord {
  std::string variant;
  long horizon = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  long violations = 0;
  // Empty on success; otherwise the error with seed, variant and step context.
  std::string error;
  std::string csv_path;
  double seconds = 0.0;

  // Throws kInvalidArgument when the metric is absent.
  double Metric(std::string_view name) const;
};

// Means over the successful runs of one (variant, horizon) group.
struct Aggregate {
  std::string variant;
  long horizon = 0;
  long runs = 0;
  long failed = 0;
  long violations = 0;
  Metrics means;

  double Mean(std::string_view name) const;
};

struct RunSummary {
  ExperimentKind kind = ExperimentKind::kStackelbergSolve;
  // Ordered by variant, then horizon, then seed.
  std::vector<RunRecord> runs;
  std::vector<Aggregate> aggregates;
  long violations = 0;
  long errors = 0;
  double seconds = 0.0;

  bool ok() const { return violations == 0 && errors == 0; }
  const Aggregate& Find(std::string_view variant, long horizon) const;
};

struct RunOutput {
  RunRecord record;
  CsvTable table;
};

// Variant labels of the config, in job order: the solver for
// stackelberg-solve, the dynamics for fisher-static, "<utility>-<dynamics>"
// for fisher-online, "mu<mu>-L<L>-d<d>" for robustness, the loss name for
// regret-report.
std::vector<std::string> Variants(const ExperimentConfig& config);

// Runs one job. Errors propagate.
RunOutput RunJob(const ExperimentConfig& config, std::size_t variant, long horizon,
                 std::uint64_t seed);

struct RunnerOptions {
  // Write per-run CSVs, summary.json and (if the config asks) SVG plots
  // under config.output_dir.
  bool write_files = true;
  // Called by the collector in job order.
  std::function<void(const RunRecord&)> progress;
};

// Dispatches every job to a pool of config.threads workers. Job failures are
// recorded, not thrown. Output is identical for any thread count.
RunSummary RunExperiment(const ExperimentConfig& config, const RunnerOptions& options = {});

std::string SummaryJson(const RunSummary& summary);
// One line per aggregate.
std::string SummaryText(const RunSummary& summary);

}  // namespace stackelberg
