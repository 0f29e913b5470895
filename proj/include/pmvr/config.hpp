#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmvr/data_io.hpp"
#include "pmvr/solvers.hpp"

namespace pmvr {

enum class Algorithm { kPmvr, kPmvrV2, kStagewise, kStagewiseV2, kBaseline };
const char* algorithm_name(Algorithm a);

struct ProblemSpec {
  std::string kind;  ///< mean_variance | mean_deviation | single_index | quadratic_toy
  // portfolio
  double lambda = 1.0;
  std::string data = "synthetic";  ///< "synthetic" or a French file path
  std::size_t assets = 10;
  std::size_t periods = 500;
  std::uint64_t data_seed = 0;
  SentinelPolicy sentinel = SentinelPolicy::kError;
  // single_index
  std::size_t rows = 20;
  std::size_t cols = 20;
  double radius = 1.0;
  double sigma = 0.1;
  // quadratic_toy
  std::vector<double> center{0.2, 0.4};
  double value_noise = 0.1;
  double outer_noise = 0.1;
};

/// Explicit parameters for the single-stage algorithms.
struct ExplicitParams {
  double eta = 0.1;
  double alpha = 0.1;
  std::size_t b0 = 1;
  std::size_t b1 = 1;
  std::size_t iterations = 100;
  std::size_t inner_iterations = 10;  ///< v2 only
  std::optional<double> coeff;        ///< v2 only; defaults to beta
};

struct RunConfig {
  ProblemSpec problem;
  Algorithm algo = Algorithm::kPmvr;
  std::optional<int> theorem;
  std::optional<double> eps;
  ScheduleConstants constants;
  std::optional<double> strong_convexity;
  std::optional<std::size_t> iterations;  ///< replaces T of a single-stage theorem schedule
  std::optional<ExplicitParams> params;
  std::optional<StageSchedule> stages;
  OutputSelection output = OutputSelection::kRandomIterate;
  std::uint64_t seed = 0;
  std::size_t reps = 1;
  std::size_t cadence = 0;
  std::optional<double> beta;
  std::string out;  ///< empty: PMVR_OUT_DIR or "runs"
  std::size_t threads = 1;
  std::optional<std::vector<double>> x0;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ValidationError with a locator such as "$.params.eta".
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
/// Cross-field checks, also run by the parsers and after CLI overrides.
void validate_run_config(const RunConfig& config);
/// Canonical JSON text of the configuration (accepted by parse_run_config).
std::string run_config_to_json(const RunConfig& config);

}  // namespace pmvr
