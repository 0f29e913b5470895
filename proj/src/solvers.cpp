#include "pmvr/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pmvr/error.hpp"

namespace pmvr {

namespace {

constexpr double kFeasibilityTol = 1e-6;

class Recorder {
 public:
  Recorder(const CompositionalProblem& problem, const FeasibleSet& set, const RunOptions& options,
           std::size_t total_iterations)
      : problem_(problem),
        set_(set),
        options_(options),
        cadence_(options.trace.cadence ? options.trace.cadence
                                       : std::max<std::size_t>(1, total_iterations / 200)),
        start_(std::chrono::steady_clock::now()) {}

  std::size_t cadence() const { return cadence_; }

  void record(const Point& x, std::uint64_t iter, std::uint32_t stage,
              const OracleCounters& counters) {
    trace_.rows.push_back(
        evaluate_row(problem_, set_, x, options_.trace, iter, stage, elapsed(), counters));
    if (options_.trace.record_iterates) trace_.iterates.push_back(x);
  }

  /// Re-evaluates the newest row at another point (a stage's chosen output).
  void replace_last(const Point& x) {
    TraceRow& last = trace_.rows.back();
    const OracleCounters c{last.sfo, last.lmo};
    last = evaluate_row(problem_, set_, x, options_.trace, last.iter, last.stage, elapsed(), c);
    if (options_.trace.record_iterates) trace_.iterates.back() = x;
  }

  RunTrace take() { return std::move(trace_); }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  const CompositionalProblem& problem_;
  const FeasibleSet& set_;
  const RunOptions& options_;
  std::size_t cadence_;
  std::chrono::steady_clock::time_point start_;
  RunTrace trace_;
};

void require_feasible(const FeasibleSet& set, const Point& x, const char* what) {
  if (x.shape() != ambient_shape(set))
    throw ShapeError(std::string(what) + ": expected " + ambient_shape(set).str() + ", got " +
                     x.shape().str());
  if (!contains(set, x, kFeasibilityTol))
    throw InvalidArgument(std::string(what) + " is not in " + describe(set));
}

void check_unit(double value, const char* field, bool allow_zero) {
  const bool ok = allow_zero ? (value >= 0.0 && value <= 1.0) : (value > 0.0 && value <= 1.0);
  if (!ok)
    throw InvalidArgument(std::string(field) + " must lie in " + (allow_zero ? "[0, 1]" : "(0, 1]") +
                          ", got " + std::to_string(value));
}

void check_count(std::size_t value, const char* field) {
  if (value == 0) throw InvalidArgument(std::string(field) + " must be at least 1");
}

void check_subsolver(const QuadraticSubsolver& s) {
  if (!(s.coeff > 0.0) || !std::isfinite(s.coeff))
    throw InvalidArgument("subsolver.coeff must be positive");
  check_count(s.inner_iterations, "subsolver.N");
}

void warn_oversized_batches(const CompositionalProblem& problem, std::size_t batch,
                            std::vector<std::string>& warnings) {
  for (std::size_t i = 0; i < problem.depth(); ++i) {
    const SampleSpace space = problem.level(i).sample_space();
    if (space.is_finite() && batch > space.records) {
      warnings.push_back("batch size " + std::to_string(batch) + " exceeds the " +
                         std::to_string(space.records) + " records of level " +
                         std::to_string(i + 1) + "; sampling with replacement");
      return;
    }
  }
}

// The per-iteration knobs shared by plain and stage-wise runs.
struct StepConfig {
  double eta;
  double alpha;
  std::size_t b1;
  std::optional<QuadraticSubsolver> subsolver;
};

void refresh_trackers(SolverState& state, const CompositionalProblem& problem,
                      const StepConfig& step, std::uint64_t seed) {
  if (state.trackers_current) return;
  const LevelBatches batches = draw_batches(problem, seed, state.iteration + 1, step.b1);
  update_trackers(state.trackers, problem, step.alpha, state.x, batches, state.counters);
  state.trackers_current = true;
}

void advance(SolverState& state, const FeasibleSet& set, const StepConfig& step) {
  const Point& v = state.trackers.gradient.v;
  Point z;
  if (step.subsolver) {
    z = quadratic_fw_subsolve(v, state.x, step.subsolver->coeff,
                              step.subsolver->inner_iterations, set, step.subsolver->gamma);
    state.counters.lmo += step.subsolver->inner_iterations;
  } else {
    z = lmo(set, v);
    state.counters.lmo += 1;
  }
  state.x = axpy(step.eta, z - state.x, state.x);
  state.trackers_current = false;
  ++state.iteration;
}

struct StageOutcome {
  Point x_out;
  SolverState state_out;
  std::uint64_t tau = 0;
};

StageOutcome run_iterations(SolverState state, const CompositionalProblem& problem,
                            const FeasibleSet& set, const StepConfig& step,
                            std::size_t iterations, std::uint64_t seed, std::uint32_t stage,
                            const RunOptions& options, Recorder& recorder, double& violation) {
  RandomSource tau_rng(seed, stream_index(StreamPurpose::kTau, stage, 0));
  const std::uint64_t tau = tau_rng.uniform_index(iterations) + 1;
  std::optional<SolverState> snapshot;
  for (std::size_t t = 1; t <= iterations; ++t) {
    refresh_trackers(state, problem, step, seed);
    if (t == tau && options.output == OutputSelection::kRandomIterate) snapshot = state;
    advance(state, set, step);
    const double v = feasibility_violation(set, state.x);
    violation = std::max(violation, v);
    if (options.check_feasibility && v > kFeasibilityTol)
      throw NumericError("iterate left the feasible set at iteration " +
                         std::to_string(state.iteration) + " (violation " + std::to_string(v) +
                         ")");
    if (state.iteration % recorder.cadence() == 0 || t == iterations)
      recorder.record(state.x, state.iteration, stage, state.counters);
  }
  StageOutcome out;
  out.tau = tau;
  if (snapshot) {
    snapshot->counters = state.counters;
    snapshot->iteration = state.iteration;
    out.x_out = snapshot->x;
    out.state_out = std::move(*snapshot);
  } else {
    out.x_out = state.x;
    out.state_out = std::move(state);
  }
  return out;
}

}  // namespace

double inner_step_size(GammaRule rule, std::size_t n) {
  switch (rule) {
    case GammaRule::kClassic:
      return 2.0 / (static_cast<double>(n) + 2.0);
    case GammaRule::kHalf:
      return 0.5;
  }
  return 0.0;
}

void SolverParams::validate() const {
  check_unit(eta, "eta", true);
  check_unit(alpha, "alpha", true);
  check_count(b0, "B0");
  check_count(b1, "B1");
  check_count(iterations, "T");
  if (subsolver) check_subsolver(*subsolver);
}

void StageSchedule::validate() const {
  check_count(b0, "B0");
  if (stages.empty()) throw InvalidArgument("stages must not be empty");
  if (!(eps1 > 0.0)) throw InvalidArgument("eps1 must be positive");
  for (const auto& s : stages) {
    check_unit(s.eta, "stages.eta", true);
    check_unit(s.alpha, "stages.alpha", true);
    check_count(s.b1, "stages.B1");
    check_count(s.iterations, "stages.T");
    if (s.inner_iterations) check_count(*s.inner_iterations, "stages.N");
  }
  if (subsolver) check_subsolver(*subsolver);
}

void BaselineParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be positive");
  check_unit(alpha, "alpha", false);
  check_count(batch, "B");
  check_count(iterations, "T");
}

SolverState initialize_state(const CompositionalProblem& problem, const Point& x1, std::size_t b0,
                             std::uint64_t seed) {
  SolverState state;
  state.x = x1;
  state.trackers = init_trackers(problem, x1, b0, seed, state.counters);
  state.trackers_current = true;
  return state;
}

void pmvr_step(SolverState& state, const CompositionalProblem& problem, const FeasibleSet& set,
               const SolverParams& params, std::uint64_t seed) {
  params.validate();
  const StepConfig step{params.eta, params.alpha, params.b1, params.subsolver};
  refresh_trackers(state, problem, step, seed);
  advance(state, set, step);
}

double subproblem_value(const Point& v, const Point& x_t, double coeff, const Point& w) {
  const Point d = w - x_t;
  return inner(v, d) + 0.5 * coeff * squared_norm(d);
}

Point quadratic_fw_subsolve(const Point& v, const Point& x_t, double coeff, std::size_t n,
                            const FeasibleSet& set, GammaRule rule) {
  if (!(coeff > 0.0)) throw InvalidArgument("quadratic_fw_subsolve: coeff must be positive");
  if (n == 0) throw InvalidArgument("quadratic_fw_subsolve: N must be at least 1");
  require_same_shape(v, x_t, "quadratic_fw_subsolve");
  require_feasible(set, x_t, "quadratic_fw_subsolve: x_t");
  Point w = x_t;
  for (std::size_t k = 1; k <= n; ++k) {
    const Point s = lmo(set, axpy(coeff, w - x_t, v));
    const double gamma = inner_step_size(rule, k);
    w = lincomb(1.0 - gamma, w, gamma, s);
  }
  return w;
}

double feasibility_violation(const FeasibleSet& set, const Point& x) {
  if (x.shape() != ambient_shape(set)) throw ShapeError("feasibility_violation: shape mismatch");
  if (std::holds_alternative<Simplex>(set)) {
    double sum = 0.0, worst = 0.0;
    for (double e : x.data()) {
      sum += e;
      worst = std::max(worst, -e);
    }
    return std::max(worst, std::abs(sum - 1.0));
  }
  if (const auto* ball = std::get_if<NuclearNormBall>(&set))
    return std::max(0.0, nuclear_norm(x) - ball->radius);
  const Box& box = std::get<Box>(set);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max({worst, box.lower[i] - x[i], x[i] - box.upper[i]});
  return worst;
}

RunResult pmvr_run(const CompositionalProblem& problem, const FeasibleSet& set,
                   const SolverParams& params, const Point& x1, std::uint64_t seed,
                   const RunOptions& options) {
  params.validate();
  require_feasible(set, x1, "starting point");
  RunResult result;
  warn_oversized_batches(problem, std::max(params.b0, params.b1), result.warnings);
  Recorder recorder(problem, set, options, params.iterations);
  recorder.record(x1, 0, 0, OracleCounters{});
  SolverState state = initialize_state(problem, x1, params.b0, seed);
  const StepConfig step{params.eta, params.alpha, params.b1, params.subsolver};
  StageOutcome out = run_iterations(std::move(state), problem, set, step, params.iterations, seed,
                                    0, options, recorder, result.max_feasibility_violation);
  result.trace = recorder.take();
  result.x_out = std::move(out.x_out);
  result.state = std::move(out.state_out);
  result.tau.push_back(out.tau);
  return result;
}

RunResult stagewise_run(const CompositionalProblem& problem, const FeasibleSet& set,
                        const StageSchedule& schedule, const Point& x0, std::uint64_t seed,
                        const RunOptions& options) {
  schedule.validate();
  require_feasible(set, x0, "starting point");
  RunResult result;
  std::size_t total = 0, largest_batch = schedule.b0;
  for (const auto& s : schedule.stages) {
    total += s.iterations;
    largest_batch = std::max(largest_batch, s.b1);
  }
  warn_oversized_batches(problem, largest_batch, result.warnings);
  Recorder recorder(problem, set, options, total);
  recorder.record(x0, 0, 1, OracleCounters{});
  SolverState state = initialize_state(problem, x0, schedule.b0, seed);
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const StageParams& p = schedule.stages[s];
    StepConfig step{p.eta, p.alpha, p.b1, schedule.subsolver};
    if (step.subsolver && p.inner_iterations) step.subsolver->inner_iterations = *p.inner_iterations;
    const auto stage = static_cast<std::uint32_t>(s + 1);
    StageOutcome out = run_iterations(std::move(state), problem, set, step, p.iterations, seed,
                                      stage, options, recorder, result.max_feasibility_violation);
    if (options.output == OutputSelection::kRandomIterate) recorder.replace_last(out.x_out);
    result.tau.push_back(out.tau);
    state = std::move(out.state_out);
    result.x_out = std::move(out.x_out);
  }
  result.trace = recorder.take();
  result.state = std::move(state);
  return result;
}

RunResult projected_scgd_baseline(const CompositionalProblem& problem, const FeasibleSet& set,
                                  const BaselineParams& params, const Point& x1,
                                  std::uint64_t seed, const RunOptions& options) {
  params.validate();
  require_feasible(set, x1, "starting point");
  RunResult result;
  warn_oversized_batches(problem, params.batch, result.warnings);
  Recorder recorder(problem, set, options, params.iterations);
  recorder.record(x1, 0, 0, OracleCounters{});

  const std::size_t k = problem.depth();
  SolverState state;
  state.x = x1;
  std::vector<Point>& u = state.trackers.values.u;
  std::vector<const Point*> factors(k);
  for (std::size_t t = 1; t <= params.iterations; ++t) {
    const LevelBatches batches = draw_batches(problem, seed, t, params.batch);
    const double inv_b = 1.0 / static_cast<double>(params.batch);
    std::vector<std::vector<Point>> jac(k);
    const Point* input = &state.x;
    for (std::size_t i = 0; i < k; ++i) {
      Point mean(Shape::vector(problem.level(i).output_dim()));
      for (Sample s : batches[i]) {
        Evaluation e = problem.level(i).evaluate(*input, s);
        mean = axpy(inv_b, e.value, mean);
        jac[i].push_back(std::move(e.jacobian));
      }
      state.counters.sfo += params.batch;
      if (t == 1)
        u.push_back(std::move(mean));
      else
        u[i] = lincomb(1.0 - params.alpha, u[i], params.alpha, mean);
      input = &u[i];
    }
    Point g(problem.input_shape());
    for (std::size_t j = 0; j < params.batch; ++j) {
      for (std::size_t i = 0; i < k; ++i) factors[i] = &jac[i][j];
      g = axpy(inv_b, chain_product(factors, problem.input_shape()), g);
    }
    state.trackers.gradient.v = g;
    state.x = project(set, axpy(-params.eta, g, state.x));
    ++state.iteration;
    const double v = feasibility_violation(set, state.x);
    result.max_feasibility_violation = std::max(result.max_feasibility_violation, v);
    if (state.iteration % recorder.cadence() == 0 || t == params.iterations)
      recorder.record(state.x, state.iteration, 0, state.counters);
  }
  result.trace = recorder.take();
  result.x_out = state.x;
  result.state = std::move(state);
  return result;
}

OracleCounters expected_counters(std::size_t depth, const SolverParams& params) {
  const std::uint64_t k = depth, t = params.iterations;
  OracleCounters c;
  c.sfo = k * params.b0 + 2 * (t - 1) * k * params.b1;
  c.lmo = t * (params.subsolver ? params.subsolver->inner_iterations : 1);
  return c;
}

OracleCounters expected_counters(std::size_t depth, const StageSchedule& schedule,
                                 OutputSelection output) {
  const std::uint64_t k = depth;
  OracleCounters c;
  c.sfo = k * schedule.b0;
  for (std::size_t s = 0; s < schedule.stages.size(); ++s) {
    const StageParams& p = schedule.stages[s];
    // After a tau snapshot the first step of the next stage reuses its trackers.
    const bool reuses = s == 0 || output == OutputSelection::kRandomIterate;
    c.sfo += 2 * (p.iterations - (reuses ? 1 : 0)) * k * p.b1;
    std::uint64_t per_step = 1;
    if (schedule.subsolver)
      per_step = p.inner_iterations.value_or(schedule.subsolver->inner_iterations);
    c.lmo += p.iterations * per_step;
  }
  return c;
}

OracleCounters expected_counters(std::size_t depth, const BaselineParams& params) {
  return OracleCounters{static_cast<std::uint64_t>(depth) * params.batch * params.iterations, 0};
}

}  // namespace pmvr
