#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmvr/benchmarks.hpp"
#include "pmvr/config.hpp"
#include "pmvr/solvers.hpp"

namespace pmvr {

/// Line sink for progress and reports.
using LogFn = std::function<void(const std::string&)>;

using Plan = std::variant<SolverParams, StageSchedule, BaselineParams>;

/// A configuration turned into concrete objects.
struct ResolvedRun {
  Benchmark bench;
  Plan plan;
  RunOptions options;
};

Benchmark build_benchmark(const ProblemSpec& spec, std::uint64_t seed_fallback = 0);
ResolvedRun resolve_run(const RunConfig& config);
RunResult execute(const ResolvedRun& run, std::uint64_t seed);
/// Closed-form counters of a resolved plan.
OracleCounters expected_counters(const ResolvedRun& run);

struct AggregateRow {
  std::uint64_t iter = 0;
  std::uint32_t stage = 0;
  std::uint64_t sfo = 0;
  std::uint64_t lmo = 0;
  std::size_t runs = 0;
  double objective_mean = 0, objective_std = 0;
  double fw_gap_mean = 0, fw_gap_std = 0;
  double grad_map_mean = 0, grad_map_std = 0;
  std::optional<double> opt_gap_mean, opt_gap_std;
};

/// Row-wise mean and sample standard deviation (0 for a single run).
/// Throws when the traces are not on the same iteration grid.
std::vector<AggregateRow> aggregate(const std::vector<std::vector<TraceRow>>& traces);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

/// Runs every repetition (seed + k for k < reps) on `threads` workers and
/// writes trace_rep{k}.csv, aggregate.csv and run_meta.json into out_dir.
struct RunSummary {
  std::filesystem::path out_dir;
  std::vector<std::vector<TraceRow>> traces;
  std::vector<AggregateRow> aggregate;
};
RunSummary run_experiment(const RunConfig& config, const std::filesystem::path& out_dir,
                          const LogFn& log = {});

/// Output directory: explicit, else the config's, else $PMVR_OUT_DIR, else "runs".
std::filesystem::path resolve_out_dir(const std::string& explicit_dir, const RunConfig* config);

struct ReproduceRequest {
  std::string experiment;  ///< matrix | mv-portfolio | md-portfolio
  std::string scale = "desk";
  std::string data_path;
  std::string out_dir;
  std::size_t threads = 1;
  std::optional<std::size_t> reps;  ///< overrides the scale's default
};
/// Config used for one algorithm of an experiment; exposed for inspection.
std::vector<RunConfig> reproduce_configs(const ReproduceRequest& request);
std::vector<RunSummary> reproduce(const ReproduceRequest& request, const LogFn& log = {});

}  // namespace pmvr
