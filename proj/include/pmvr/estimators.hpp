#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pmvr/point.hpp"
#include "pmvr/problem.hpp"

namespace pmvr {

/// SFO and LMO call counts. Metric evaluation never touches these.
struct OracleCounters {
  std::uint64_t sfo = 0;
  std::uint64_t lmo = 0;
  friend bool operator==(const OracleCounters&, const OracleCounters&) = default;
};

/// u^1..u^K tracking f_i(u^{i-1}); `u[i]` tracks level i+1.
struct ValueTrackers {
  std::vector<Point> u;
  friend bool operator==(const ValueTrackers&, const ValueTrackers&) = default;
};

/// v tracking grad F, in the decision-variable shape.
struct GradientTracker {
  Point v;
  friend bool operator==(const GradientTracker&, const GradientTracker&) = default;
};

/// Both trackers plus the point u^0 they were last evaluated at.
struct TrackerState {
  ValueTrackers values;
  GradientTracker gradient;
  Point anchor;

  /// Chain inputs [u^0, u^1, ..., u^{K-1}].
  std::vector<Point> chain() const;
  friend bool operator==(const TrackerState&, const TrackerState&) = default;
};

/// One batch per level, each non-empty.
using LevelBatches = std::vector<std::vector<Sample>>;

/// Fresh batches of `batch_size` for every level, from the sample substreams
/// of (seed, level, iteration).
LevelBatches draw_batches(const CompositionalProblem& problem, std::uint64_t seed,
                          std::uint64_t iteration, std::size_t batch_size);

/// Plain mini-batch means along the chain u^0 = x1; adds sum of batch sizes to sfo.
TrackerState init_trackers(const CompositionalProblem& problem, const Point& x1,
                           const LevelBatches& batches, OracleCounters& counters);
TrackerState init_trackers(const CompositionalProblem& problem, const Point& x1, std::size_t b0,
                           std::uint64_t seed, OracleCounters& counters);

/// Result of the STORM value update for one level, keeping the per-sample
/// Jacobians at both points so the gradient tracker can reuse the same SFO calls.
struct LevelUpdate {
  Point u;
  std::vector<Point> jacobians_new;
  std::vector<Point> jacobians_old;
};

/// u_t = (1-a) u_{t-1} + mean f(new_input; xi) - (1-a) mean f(old_input; xi)
/// over one shared batch. Costs 2 SFO calls per sample.
LevelUpdate storm_level_update(const Level& level, double alpha, const Point& u_prev,
                               const Point& new_input, const Point& old_input,
                               std::span<const Sample> batch, OracleCounters& counters);

/// Value-only form of `storm_level_update`. Updates `trackers.u[level_index]`.
Point storm_value_update(ValueTrackers& trackers, const CompositionalProblem& problem,
                         std::size_t level_index, double alpha, const Point& new_input,
                         const Point& old_input, std::span<const Sample> batch,
                         OracleCounters& counters);

/// v_t = (1-a) v_{t-1} + mean prod J(new) - (1-a) mean prod J(old) from
/// already-evaluated per-level, per-sample Jacobians.
Point combine_gradient(const Point& v_prev, double alpha,
                       const std::vector<std::vector<Point>>& jacobians_new,
                       const std::vector<std::vector<Point>>& jacobians_old, Shape shape);

/// Gradient-tracker update that evaluates its own Jacobians on the shared
/// batches (2 SFO calls per sample and level). Updates `tracker.v`.
Point storm_gradient_update(GradientTracker& tracker, const CompositionalProblem& problem,
                            double alpha, const std::vector<Point>& new_chain,
                            const std::vector<Point>& old_chain, const LevelBatches& batches,
                            OracleCounters& counters);

/// The fused per-iteration update used by the solvers: every value tracker in
/// level order, then the gradient tracker, from the same SFO calls.
/// Total cost 2 * sum of batch sizes.
void update_trackers(TrackerState& state, const CompositionalProblem& problem, double alpha,
                     const Point& new_x, const LevelBatches& batches, OracleCounters& counters);

}  // namespace pmvr
