#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pmvr/estimators.hpp"
#include "pmvr/feasible_set.hpp"
#include "pmvr/problem.hpp"

namespace pmvr {

/// max over the set of <x_hat - x, -g>, i.e. <x - lmo(g), g>.
double fw_gap_from_gradient(const FeasibleSet& set, const Point& x, const Point& gradient);
/// ||beta (x - Proj(x - g / beta))||^2.
double gradient_mapping_from_gradient(const FeasibleSet& set, const Point& x, const Point& gradient,
                                      double beta);

/// Frank-Wolfe gap with the exact gradient. Throws NumericError when the
/// result falls below -1e-9, which means an oracle is inconsistent.
double fw_gap(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x);
double gradient_mapping(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x,
                        double beta = 1.0);
/// F(x) - F*, with F* from `reference` or else the problem metadata.
double optimal_gap(const CompositionalProblem& problem, const Point& x,
                   std::optional<double> reference = std::nullopt);

/// One sampled point of a run. stage is 0 outside stage-wise runs.
struct TraceRow {
  std::uint64_t iter = 0;
  std::uint32_t stage = 0;
  double seconds = 0.0;
  std::uint64_t sfo = 0;
  std::uint64_t lmo = 0;
  double objective = 0.0;
  double fw_gap = 0.0;
  double grad_map = 0.0;
  double beta = 1.0;
  std::optional<double> opt_gap;
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RunTrace {
  std::vector<TraceRow> rows;
  /// Iterate behind each row, same order.
  std::vector<Point> iterates;
};

/// Metric settings shared by every solver.
struct TraceConfig {
  std::size_t cadence = 0;  ///< 0 picks max(1, T / 200)
  double beta = 1.0;
  std::optional<double> optimal_value;  ///< falls back to problem metadata
  bool record_iterates = true;
};

/// Exact metrics at x with the given counters; one gradient evaluation.
TraceRow evaluate_row(const CompositionalProblem& problem, const FeasibleSet& set, const Point& x,
                      const TraceConfig& config, std::uint64_t iter, std::uint32_t stage,
                      double seconds, const OracleCounters& counters);

}  // namespace pmvr
