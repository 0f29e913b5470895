#include "pmvr/estimators.hpp"

#include "pmvr/error.hpp"

namespace pmvr {

namespace {

// mean_new - (1 - alpha) * mean_old, then (1 - alpha) * prev + difference.
// The difference is formed first so identical batches cancel exactly.
Point storm_combine(const Point& prev, double alpha, const Point& sum_new, const Point& sum_old,
                    std::size_t batch) {
  const double inv_b = 1.0 / static_cast<double>(batch);
  const double keep = 1.0 - alpha;
  Point out(prev.shape());
  auto o = out.mutable_data();
  auto p = prev.data();
  auto sn = sum_new.data();
  auto so = sum_old.data();
  for (std::size_t k = 0; k < o.size(); ++k) {
    const double diff = sn[k] * inv_b - keep * (so[k] * inv_b);
    o[k] = keep * p[k] + diff;
  }
  out.check_finite("storm update");
  return out;
}

void accumulate(Point& sum, const Point& term) {
  require_same_shape(sum, term, "batch mean");
  auto s = sum.mutable_data();
  auto t = term.data();
  for (std::size_t k = 0; k < s.size(); ++k) s[k] += t[k];
}

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("STORM momentum must lie in [0, 1]");
}

Point per_sample_chain_sum(const std::vector<std::vector<Point>>& jacobians, Shape shape) {
  const std::size_t batch = jacobians.front().size();
  Point sum(shape);
  std::vector<const Point*> factors(jacobians.size());
  for (std::size_t j = 0; j < batch; ++j) {
    for (std::size_t i = 0; i < jacobians.size(); ++i) {
      if (jacobians[i].size() != batch)
        throw InvalidArgument("combine_gradient: levels must share the batch size");
      factors[i] = &jacobians[i][j];
    }
    accumulate(sum, chain_product(factors, shape));
  }
  return sum;
}

}  // namespace

std::vector<Point> TrackerState::chain() const {
  std::vector<Point> c;
  c.reserve(values.u.size());
  c.push_back(anchor);
  for (std::size_t i = 0; i + 1 < values.u.size(); ++i) c.push_back(values.u[i]);
  return c;
}

LevelBatches draw_batches(const CompositionalProblem& problem, std::uint64_t seed,
                          std::uint64_t iteration, std::size_t batch_size) {
  LevelBatches batches;
  batches.reserve(problem.depth());
  for (std::size_t i = 0; i < problem.depth(); ++i) {
    RandomSource rng(seed, stream_index(StreamPurpose::kSamples, i + 1, iteration));
    batches.push_back(sample_batch(problem.level(i), rng, batch_size));
  }
  return batches;
}

TrackerState init_trackers(const CompositionalProblem& problem, const Point& x1,
                           const LevelBatches& batches, OracleCounters& counters) {
  if (batches.size() != problem.depth()) throw InvalidArgument("init_trackers: one batch per level");
  if (x1.shape() != problem.input_shape()) throw ShapeError("init_trackers: x1 has wrong shape");
  TrackerState state;
  state.anchor = x1;
  std::vector<std::vector<Point>> jac(problem.depth());
  const Point* input = &x1;
  for (std::size_t i = 0; i < problem.depth(); ++i) {
    const auto& batch = batches[i];
    if (batch.empty()) throw InvalidArgument("init_trackers: B0 must be at least 1");
    const Level& level = problem.level(i);
    Point sum(Shape::vector(level.output_dim()));
    for (Sample s : batch) {
      Evaluation e = level.evaluate(*input, s);
      accumulate(sum, e.value);
      jac[i].push_back(std::move(e.jacobian));
    }
    counters.sfo += batch.size();
    state.values.u.push_back((1.0 / static_cast<double>(batch.size())) * sum);
    input = &state.values.u.back();
  }
  // Every level shares one batch size here; product j pairs the j-th draws.
  for (const auto& b : batches)
    if (b.size() != batches.front().size())
      throw InvalidArgument("init_trackers: levels must share the batch size");
  Point sum = per_sample_chain_sum(jac, problem.input_shape());
  state.gradient.v = (1.0 / static_cast<double>(batches.front().size())) * sum;
  return state;
}

TrackerState init_trackers(const CompositionalProblem& problem, const Point& x1, std::size_t b0,
                           std::uint64_t seed, OracleCounters& counters) {
  if (b0 == 0) throw InvalidArgument("init_trackers: B0 must be at least 1");
  return init_trackers(problem, x1, draw_batches(problem, seed, 1, b0), counters);
}

LevelUpdate storm_level_update(const Level& level, double alpha, const Point& u_prev,
                               const Point& new_input, const Point& old_input,
                               std::span<const Sample> batch, OracleCounters& counters) {
  check_alpha(alpha);
  if (batch.empty()) throw InvalidArgument("storm update: empty batch");
  LevelUpdate out;
  Point sum_new(u_prev.shape()), sum_old(u_prev.shape());
  out.jacobians_new.reserve(batch.size());
  out.jacobians_old.reserve(batch.size());
  for (Sample s : batch) {
    Evaluation en = level.evaluate(new_input, s);
    Evaluation eo = level.evaluate(old_input, s);
    accumulate(sum_new, en.value);
    accumulate(sum_old, eo.value);
    out.jacobians_new.push_back(std::move(en.jacobian));
    out.jacobians_old.push_back(std::move(eo.jacobian));
  }
  counters.sfo += 2 * batch.size();
  out.u = storm_combine(u_prev, alpha, sum_new, sum_old, batch.size());
  return out;
}

Point storm_value_update(ValueTrackers& trackers, const CompositionalProblem& problem,
                         std::size_t level_index, double alpha, const Point& new_input,
                         const Point& old_input, std::span<const Sample> batch,
                         OracleCounters& counters) {
  if (level_index >= trackers.u.size()) throw InvalidArgument("storm_value_update: bad level");
  auto r = storm_level_update(problem.level(level_index), alpha, trackers.u[level_index],
                              new_input, old_input, batch, counters);
  trackers.u[level_index] = r.u;
  return r.u;
}

Point combine_gradient(const Point& v_prev, double alpha,
                       const std::vector<std::vector<Point>>& jacobians_new,
                       const std::vector<std::vector<Point>>& jacobians_old, Shape shape) {
  check_alpha(alpha);
  if (jacobians_new.empty() || jacobians_new.size() != jacobians_old.size())
    throw InvalidArgument("combine_gradient: mismatched Jacobian sets");
  const std::size_t batch = jacobians_new.front().size();
  if (batch == 0) throw InvalidArgument("combine_gradient: empty batch");
  const Point sum_new = per_sample_chain_sum(jacobians_new, shape);
  const Point sum_old = per_sample_chain_sum(jacobians_old, shape);
  return storm_combine(v_prev, alpha, sum_new, sum_old, batch);
}

Point storm_gradient_update(GradientTracker& tracker, const CompositionalProblem& problem,
                            double alpha, const std::vector<Point>& new_chain,
                            const std::vector<Point>& old_chain, const LevelBatches& batches,
                            OracleCounters& counters) {
  const std::size_t k = problem.depth();
  if (new_chain.size() != k || old_chain.size() != k)
    throw ShapeError("storm_gradient_update: chains must have K = " + std::to_string(k) +
                     " entries");
  if (batches.size() != k) throw InvalidArgument("storm_gradient_update: one batch per level");
  std::vector<std::vector<Point>> jn(k), jo(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (batches[i].empty()) throw InvalidArgument("storm_gradient_update: empty batch");
    for (Sample s : batches[i]) {
      jn[i].push_back(problem.level(i).evaluate(new_chain[i], s).jacobian);
      jo[i].push_back(problem.level(i).evaluate(old_chain[i], s).jacobian);
    }
    counters.sfo += 2 * batches[i].size();
  }
  tracker.v = combine_gradient(tracker.v, alpha, jn, jo, problem.input_shape());
  return tracker.v;
}

void update_trackers(TrackerState& state, const CompositionalProblem& problem, double alpha,
                     const Point& new_x, const LevelBatches& batches, OracleCounters& counters) {
  const std::size_t k = problem.depth();
  if (batches.size() != k) throw InvalidArgument("update_trackers: one batch per level");
  const std::vector<Point> old_chain = state.chain();
  std::vector<std::vector<Point>> jn(k), jo(k);
  const Point* new_input = &new_x;
  for (std::size_t i = 0; i < k; ++i) {
    LevelUpdate r = storm_level_update(problem.level(i), alpha, state.values.u[i], *new_input,
                                       old_chain[i], batches[i], counters);
    state.values.u[i] = std::move(r.u);
    jn[i] = std::move(r.jacobians_new);
    jo[i] = std::move(r.jacobians_old);
    new_input = &state.values.u[i];
  }
  state.gradient.v = combine_gradient(state.gradient.v, alpha, jn, jo, problem.input_shape());
  state.anchor = new_x;
}

}  // namespace pmvr
