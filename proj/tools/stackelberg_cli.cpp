// Config-driven experiment runner. Exit status: 0 when every run finished
// without a bound violation, 1 on violations or run errors, 2 on bad usage
// or an invalid config.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stackelberg/error.hpp"
#include "stackelberg/experiment/config.hpp"
#include "stackelberg/experiment/runner.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool plot = false;
  std::optional<double> tol;
  std::optional<int> threads;
  bool quiet = false;
};

int Run(stackelberg::ExperimentKind kind, const Flags& flags) {
  using namespace stackelberg;
  ExperimentConfig config;
  try {
    config = LoadConfig(flags.config);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  if (config.kind != kind) {
    std::cerr << flags.config << ": config is a " << ToString(config.kind)
              << " experiment, not " << ToString(kind) << "\n";
    return 2;
  }
  if (flags.seed) config.seeds = {*flags.seed};
  if (flags.out_dir) config.output_dir = *flags.out_dir;
  if (flags.plot) config.plot = true;
  if (flags.tol) config.tolerance = *flags.tol;
  if (flags.threads) config.threads = *flags.threads;

  RunnerOptions options;
  if (!flags.quiet) {
    options.progress = [](const RunRecord& r) {
      std::cerr << r.variant << " T=" << r.horizon << " seed=" << r.seed;
      if (!r.error.empty()) std::cerr << " ERROR";
      if (r.violations) std::cerr << " violations=" << r.violations;
      std::cerr << "\n";
    };
  }
  RunSummary summary;
  try {
    summary = RunExperiment(config, options);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  std::cout << SummaryText(summary);
  std::cout << "wrote " << config.output_dir << "/summary.json\n";
  return summary.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Run min-max Stackelberg game experiments from a YAML config."};
  app.require_subcommand(1);
  Flags flags;
  int status = 0;
  const stackelberg::ExperimentKind kinds[] = {
      stackelberg::ExperimentKind::kStackelbergSolve, stackelberg::ExperimentKind::kFisherStatic,
      stackelberg::ExperimentKind::kFisherOnline,     stackelberg::ExperimentKind::kRobustnessAsym,
      stackelberg::ExperimentKind::kRobustnessSym,    stackelberg::ExperimentKind::kRegretReport,
  };
  for (stackelberg::ExperimentKind kind : kinds) {
    CLI::App* sub = app.add_subcommand(stackelberg::ToString(kind));
    sub->add_option("--config", flags.config, "YAML experiment config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "run this seed only");
    sub->add_option("--out-dir", flags.out_dir, "override output_dir");
    sub->add_flag("--plot", flags.plot, "write SVG convergence plots");
    sub->add_option("--tol", flags.tol, "tolerance override")->check(CLI::PositiveNumber);
    sub->add_option("--threads", flags.threads, "worker threads, 0 = all cores")
        ->check(CLI::NonNegativeNumber);
    sub->add_flag("-q,--quiet", flags.quiet, "no per-run progress");
    sub->callback([&flags, &status, kind] { status = Run(kind, flags); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return status;
}
