#include "pmvr/metrics.hpp"

#include "pmvr/error.hpp"

namespace pmvr {

double fw_gap_from_gradient(const FeasibleSet& set, const Point& x, const Point& gradient) {
  const Point z = lmo(set, gradient);
  return inner(x - z, gradient);
}

double gradient_mapping_from_gradient(const FeasibleSet& set, const Point& x, const Point& gradient,
                                      double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("gradient_mapping: beta must be positive");
  const Point p = project(set, axpy(-1.0 / beta, gradient, x));
  return squared_norm(beta * (x - p));
}

double fw_gap(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x) {
  const double gap = fw_gap_from_gradient(set, x, exact_gradient(problem, x));
  if (gap < -1e-9) throw NumericError("fw_gap: negative gap " + std::to_string(gap));
  return gap;
}

double gradient_mapping(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x,
                        double beta) {
  return gradient_mapping_from_gradient(set, x, exact_gradient(problem, x), beta);
}

double optimal_gap(const CompositionalProblem& problem, const Point& x,
                   std::optional<double> reference) {
  const auto fstar = reference ? reference : problem.metadata().optimal_value;
  if (!fstar) throw InvalidArgument("optimal_gap: no optimal value known for " + problem.name());
  return exact_objective(problem, x) - *fstar;
}

TraceRow evaluate_row(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x,
                      const TraceConfig& config, std::uint64_t iter, std::uint32_t stage,
                      double seconds, const OracleCounters& counters) {
  TraceRow row;
  row.iter = iter;
  row.stage = stage;
  row.seconds = seconds;
  row.sfo = counters.sfo;
  row.lmo = counters.lmo;
  row.beta = config.beta;
  row.objective = exact_objective(problem, x);
  const Point g = exact_gradient(problem, x);
  row.fw_gap = fw_gap_from_gradient(set, x, g);
  row.grad_map = gradient_mapping_from_gradient(set, x, g, config.beta);
  const auto fstar = config.optimal_value ? config.optimal_value : problem.metadata().optimal_value;
  if (fstar) row.opt_gap = row.objective - *fstar;
  return row;
}

}  // namespace pmvr
