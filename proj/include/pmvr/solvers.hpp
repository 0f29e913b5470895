#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pmvr/estimators.hpp"
#include "pmvr/feasible_set.hpp"
#include "pmvr/metrics.hpp"
#include "pmvr/problem.hpp"

namespace pmvr {

/// Inner Frank-Wolfe step rule. kHalf (gamma = 1/2) does not converge and
/// exists only as a negative control for the self-check.
enum class GammaRule { kClassic, kHalf };
double inner_step_size(GammaRule rule, std::size_t n);

/// Replaces the plain LMO step with N inner Frank-Wolfe steps on
/// <v, w - x> + coeff/2 ||w - x||^2.
struct QuadraticSubsolver {
  double coeff = 1.0;
  std::size_t inner_iterations = 1;
  GammaRule gamma = GammaRule::kClassic;
};

struct SolverParams {
  double eta = 1.0;
  double alpha = 1.0;
  std::size_t b0 = 1;
  std::size_t b1 = 1;
  std::size_t iterations = 1;
  std::optional<QuadraticSubsolver> subsolver;
  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

struct SolverState {
  Point x;
  TrackerState trackers;
  /// True when the trackers already describe x (after init, or a tau snapshot);
  /// the next step then reuses them instead of drawing a batch.
  bool trackers_current = false;
  OracleCounters counters;
  std::uint64_t iteration = 0;  ///< completed iterations, global across stages
};

/// x1 with trackers from init_trackers on B0 samples.
SolverState initialize_state(const CompositionalProblem& problem, const Point& x1, std::size_t b0,
                             std::uint64_t seed);

/// One iteration: refresh trackers at x_t (unless current), take z_t from the
/// LMO or the subsolver, then x_{t+1} = x_t + eta (z_t - x_t).
void pmvr_step(SolverState& state, const CompositionalProblem& problem, const FeasibleSet& set,
               const SolverParams& params, std::uint64_t seed);

/// <v, w - x_t> + coeff/2 ||w - x_t||^2.
double subproblem_value(const Point& v, const Point& x_t, double coeff, const Point& w);
/// w_{N+1} of the inner Frank-Wolfe loop started at w_1 = x_t.
Point quadratic_fw_subsolve(const Point& v, const Point& x_t, double coeff, std::size_t n,
                            const FeasibleSet& set, GammaRule rule = GammaRule::kClassic);

enum class OutputSelection { kRandomIterate, kLastIterate };

struct RunOptions {
  TraceConfig trace;
  OutputSelection output = OutputSelection::kRandomIterate;
  /// Throw when an iterate leaves the set by more than 1e-6.
  bool check_feasibility = true;
};

struct RunResult {
  RunTrace trace;
  Point x_out;
  /// State to continue from: the tau snapshot (trackers current) or the last state.
  SolverState state;
  std::vector<std::uint64_t> tau;  ///< one draw per stage
  double max_feasibility_violation = 0.0;
  std::vector<std::string> warnings;
};

/// Distance-like measure of how far x is outside the set; 0 when inside.
/// Simplex: max(|sum x - 1|, -min x). Nuclear ball: ||x||_* - s.
double feasibility_violation(const FeasibleSet& set, const Point& x);

RunResult pmvr_run(const CompositionalProblem& problem, const FeasibleSet& set,
                   const SolverParams& params, const Point& x1, std::uint64_t seed,
                   const RunOptions& options = {});

struct StageParams {
  double eta = 1.0;
  double alpha = 1.0;
  std::size_t b1 = 1;
  std::size_t iterations = 1;
  std::optional<std::size_t> inner_iterations;  ///< per-stage N override
};

struct StageSchedule {
  std::size_t b0 = 1;
  double eps1 = 1.0;
  std::vector<StageParams> stages;
  /// Present for the v2 variant; coeff is lambda/2.
  std::optional<QuadraticSubsolver> subsolver;
  void validate() const;
};

/// Stage s warm-starts x and both trackers from stage s-1.
RunResult stagewise_run(const CompositionalProblem& problem, const FeasibleSet& set,
                        const StageSchedule& schedule, const Point& x0, std::uint64_t seed,
                        const RunOptions& options = {});

struct BaselineParams {
  double eta = 0.1;
  double alpha = 1.0;
  std::size_t batch = 1;
  std::size_t iterations = 1;
  void validate() const;
};

/// Projected stochastic compositional gradient: moving-average inner values,
/// mini-batch chain gradient, x_{t+1} = Proj(x_t - eta * g_t).
RunResult projected_scgd_baseline(const CompositionalProblem& problem, const FeasibleSet& set,
                                  const BaselineParams& params, const Point& x1,
                                  std::uint64_t seed, const RunOptions& options = {});

/// Closed-form oracle counts.
OracleCounters expected_counters(std::size_t depth, const SolverParams& params);
OracleCounters expected_counters(std::size_t depth, const StageSchedule& schedule,
                                 OutputSelection output);
OracleCounters expected_counters(std::size_t depth, const BaselineParams& params);

enum class Criterion { kFrankWolfeGap, kGradientMapping, kConvexGap, kStronglyConvexGap };
enum class BatchMode { kConstant, kLarge };

/// Multipliers for every O(.) term; all default to 1.
struct ScheduleConstants {
  double eta = 1.0;
  double alpha = 1.0;
  double b0 = 1.0;
  double b1 = 1.0;
  double iterations = 1.0;
  double inner = 1.0;
  double eps1 = 1.0;  ///< initial accuracy of stage-wise schedules
  double beta = 1.0;  ///< subsolver coefficient for gradient-mapping schedules
};

using Schedule = std::variant<SolverParams, StageSchedule>;

Schedule schedule_for(Criterion criterion, BatchMode mode, double eps,
                      const ScheduleConstants& constants = {},
                      std::optional<double> lambda = std::nullopt);
/// thm1..thm8 by number.
Schedule theorem_schedule(int theorem, double eps, const ScheduleConstants& constants = {},
                          std::optional<double> lambda = std::nullopt);

/// Smallest integer >= max(1, x), forgiving rounding noise of a few ulps.
std::size_t ceil_count(double x);

}  // namespace pmvr
