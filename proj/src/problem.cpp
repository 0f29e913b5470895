#include "pmvr/problem.hpp"

#include "pmvr/error.hpp"

namespace pmvr {

CompositionalProblem::CompositionalProblem(std::vector<LevelPtr> levels, ProblemMetadata metadata,
                                           std::string name)
    : levels_(std::move(levels)), metadata_(metadata), name_(std::move(name)) {
  if (levels_.empty()) throw InvalidArgument("CompositionalProblem: needs at least one level");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (!levels_[i]) throw InvalidArgument("CompositionalProblem: null level");
    if (i + 1 < levels_.size()) {
      const Shape next = levels_[i + 1]->input_shape();
      if (next.is_matrix || next.size() != levels_[i]->output_dim())
        throw ShapeError("CompositionalProblem: level " + std::to_string(i + 1) + " outputs " +
                         std::to_string(levels_[i]->output_dim()) + " values but level " +
                         std::to_string(i + 2) + " expects " + next.str());
    }
  }
  if (levels_.back()->output_dim() != 1)
    throw ShapeError("CompositionalProblem: final level must be scalar-valued");
}

namespace {

void check_input(const CompositionalProblem& problem, const Point& x) {
  if (x.shape() != problem.input_shape())
    throw ShapeError("problem input: expected " + problem.input_shape().str() + ", got " +
                     x.shape().str());
}

}  // namespace

std::vector<Point> exact_inner_values(const CompositionalProblem& problem, const Point& x) {
  check_input(problem, x);
  std::vector<Point> chain;
  chain.reserve(problem.depth());
  const Point* input = &x;
  for (const auto& level : problem.levels()) {
    chain.push_back(level->exact_value(*input));
    input = &chain.back();
  }
  return chain;
}

double exact_objective(const CompositionalProblem& problem, const Point& x) {
  return exact_inner_values(problem, x).back()[0];
}

Point exact_gradient(const CompositionalProblem& problem, const Point& x) {
  const auto chain = exact_inner_values(problem, x);
  std::vector<Point> factors;
  factors.reserve(problem.depth());
  for (std::size_t i = 0; i < problem.depth(); ++i) {
    const Point& input = i == 0 ? x : chain[i - 1];
    factors.push_back(problem.level(i).exact_jacobian(input));
  }
  return matmul_chain(factors).reshaped(problem.input_shape());
}

std::vector<Sample> sample_batch(const Level& level, RandomSource& rng, std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgument("sample_batch: batch size must be at least 1");
  std::vector<Sample> batch(batch_size);
  const SampleSpace space = level.sample_space();
  for (auto& s : batch) s = space.is_finite() ? rng.uniform_index(space.records) : rng();
  return batch;
}

std::vector<Sample> enumerate_samples(const Level& level) {
  const SampleSpace space = level.sample_space();
  if (!space.is_finite()) throw InvalidArgument("enumerate_samples: level is generative");
  std::vector<Sample> all(space.records);
  for (std::uint64_t i = 0; i < space.records; ++i) all[i] = i;
  return all;
}

Point chain_product(const std::vector<const Point*>& jacobians, Shape shape) {
  if (jacobians.empty()) throw InvalidArgument("chain_product: empty chain");
  // Fold from the scalar end: g <- J_i g keeps every intermediate a vector.
  std::vector<double> g(jacobians.back()->data().begin(), jacobians.back()->data().end());
  for (std::size_t k = jacobians.size() - 1; k-- > 0;) {
    const Point& j = *jacobians[k];
    if (j.cols() != g.size())
      throw ShapeError("chain_product: dimension mismatch at position " + std::to_string(k + 1));
    std::vector<double> next(j.rows(), 0.0);
    auto jd = j.data();
    for (std::size_t r = 0; r < j.rows(); ++r) {
      const double* row = jd.data() + r * j.cols();
      double s = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) s += row[c] * g[c];
      next[r] = s;
    }
    g.swap(next);
  }
  return Point(shape, std::move(g));
}

Point stochastic_chain_jacobian(const CompositionalProblem& problem,
                                const std::vector<Point>& chain_inputs,
                                const std::vector<Sample>& samples) {
  if (chain_inputs.size() != problem.depth() || samples.size() != problem.depth())
    throw ShapeError("stochastic_chain_jacobian: need one input and one sample per level");
  std::vector<Point> jac;
  jac.reserve(problem.depth());
  for (std::size_t i = 0; i < problem.depth(); ++i)
    jac.push_back(problem.level(i).evaluate(chain_inputs[i], samples[i]).jacobian);
  std::vector<const Point*> ptrs;
  for (const auto& j : jac) ptrs.push_back(&j);
  return chain_product(ptrs, problem.input_shape());
}

FunctionLevel::FunctionLevel(Shape input, std::size_t output_dim, ValueFn value, ValueFn jacobian,
                             std::string name)
    : FunctionLevel(input, output_dim, value, jacobian, nullptr, SampleSpace::finite(1),
                    std::move(name)) {}

FunctionLevel::FunctionLevel(Shape input, std::size_t output_dim, ValueFn value, ValueFn jacobian,
                             NoisyFn noisy, SampleSpace space, std::string name)
    : input_(input),
      output_dim_(output_dim),
      value_(std::move(value)),
      jacobian_(std::move(jacobian)),
      noisy_(std::move(noisy)),
      space_(space),
      name_(std::move(name)) {}

Evaluation FunctionLevel::evaluate(const Point& x, Sample sample) const {
  if (noisy_) return noisy_(x, sample);
  return {exact_value(x), exact_jacobian(x)};
}

Point FunctionLevel::exact_value(const Point& x) const {
  if (x.shape() != input_) throw ShapeError(name_ + ": input " + x.shape().str());
  return value_(x);
}

Point FunctionLevel::exact_jacobian(const Point& x) const {
  if (x.shape() != input_) throw ShapeError(name_ + ": input " + x.shape().str());
  return jacobian_(x);
}

}  // namespace pmvr
