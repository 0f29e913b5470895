#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmvr/point.hpp"
#include "pmvr/random.hpp"

namespace pmvr {

/// Opaque sample key. For finite datasets it is the record index; for
/// generative levels it seeds the counter-based generator that reproduces
/// the draw, so a key always maps to the same (value, Jacobian) pair.
using Sample = std::uint64_t;

/// Where a level's samples come from.
struct SampleSpace {
  enum class Kind { kFinite, kGenerative };
  Kind kind = Kind::kFinite;
  std::uint64_t records = 1;  ///< dataset size M for kFinite

  static SampleSpace finite(std::uint64_t m) { return {Kind::kFinite, m}; }
  static SampleSpace generative() { return {Kind::kGenerative, 0}; }
  bool is_finite() const noexcept { return kind == Kind::kFinite; }
};

/// One SFO answer: the noisy value and Jacobian of a level at one point.
/// The Jacobian has shape input-size x output-dim.
struct Evaluation {
  Point value;
  Point jacobian;
};

/// One level f_i of a compositional objective. Implementations must make
/// `evaluate` an unbiased estimator of (`exact_value`, `exact_jacobian`) over
/// the declared sample space.
class Level {
 public:
  virtual ~Level() = default;

  virtual Shape input_shape() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual SampleSpace sample_space() const = 0;

  virtual Evaluation evaluate(const Point& x, Sample sample) const = 0;
  virtual Point exact_value(const Point& x) const = 0;
  virtual Point exact_jacobian(const Point& x) const = 0;

  virtual std::string name() const { return "level"; }
};

using LevelPtr = std::shared_ptr<const Level>;

/// Optional constants known about a problem. Schedules fall back to
/// user-supplied scales when these are absent.
struct ProblemMetadata {
  std::optional<double> lipschitz_value;     ///< L_f
  std::optional<double> lipschitz_jacobian;  ///< L_J
  std::optional<double> mean_smooth_value;   ///< mean-square smoothness of values
  std::optional<double> mean_smooth_jacobian;
  std::optional<double> sigma;
  std::optional<double> sigma_jacobian;
  std::optional<double> initial_gap;  ///< Delta_F
  std::optional<double> optimal_value;
  bool optimal_value_exact = false;  ///< false when optimal_value is only a reference run
  std::optional<double> strong_convexity;
  std::optional<double> smoothness_beta;  ///< suggested beta for the gradient mapping
};

/// F = f_K o ... o f_1 with scalar output. Immutable after construction;
/// level dimensions are checked here, never at solve time.
class CompositionalProblem {
 public:
  CompositionalProblem(std::vector<LevelPtr> levels, ProblemMetadata metadata = {},
                       std::string name = "problem");

  std::size_t depth() const noexcept { return levels_.size(); }
  const Level& level(std::size_t i) const { return *levels_.at(i); }  ///< 0-based
  const std::vector<LevelPtr>& levels() const noexcept { return levels_; }
  Shape input_shape() const { return levels_.front()->input_shape(); }
  const ProblemMetadata& metadata() const noexcept { return metadata_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<LevelPtr> levels_;
  ProblemMetadata metadata_;
  std::string name_;
};

/// Exact chain [y^1, ..., y^K] with y^0 = x and y^i = f_i(y^{i-1}).
std::vector<Point> exact_inner_values(const CompositionalProblem& problem, const Point& x);
/// F(x), the last entry of the exact chain.
double exact_objective(const CompositionalProblem& problem, const Point& x);
/// grad F(x) = prod_i grad f_i(y^{i-1}), returned in the decision-variable shape.
Point exact_gradient(const CompositionalProblem& problem, const Point& x);

/// B i.i.d. samples for a level; finite datasets are sampled uniformly with replacement.
std::vector<Sample> sample_batch(const Level& level, RandomSource& rng, std::size_t batch_size);
/// Every record of a finite level, in order.
std::vector<Sample> enumerate_samples(const Level& level);

/// Product of noisy Jacobians grad f_i(chain[i-1]; samples[i-1]) for i = 1..K.
/// Each factor is unbiased; the product generally is not.
Point stochastic_chain_jacobian(const CompositionalProblem& problem,
                                const std::vector<Point>& chain_inputs,
                                const std::vector<Sample>& samples);

/// Product of already-evaluated Jacobians, folded right to left and returned
/// in `shape`. Equivalent to matmul_chain for the K x (d_{i-1} x d_i) chain.
Point chain_product(const std::vector<const Point*>& jacobians, Shape shape);

/// Level assembled from callables; used for examples and small test problems.
/// Noisy oracles receive the sample key; exact ones the unperturbed function.
class FunctionLevel final : public Level {
 public:
  using ValueFn = std::function<Point(const Point&)>;
  using NoisyFn = std::function<Evaluation(const Point&, Sample)>;

  /// Deterministic level: the noisy oracle equals the exact one.
  FunctionLevel(Shape input, std::size_t output_dim, ValueFn value, ValueFn jacobian,
                std::string name = "function");
  /// Level with a custom noisy oracle over `space`.
  FunctionLevel(Shape input, std::size_t output_dim, ValueFn value, ValueFn jacobian,
                NoisyFn noisy, SampleSpace space, std::string name = "function");

  Shape input_shape() const override { return input_; }
  std::size_t output_dim() const override { return output_dim_; }
  SampleSpace sample_space() const override { return space_; }
  Evaluation evaluate(const Point& x, Sample sample) const override;
  Point exact_value(const Point& x) const override;
  Point exact_jacobian(const Point& x) const override;
  std::string name() const override { return name_; }

 private:
  Shape input_;
  std::size_t output_dim_;
  ValueFn value_;
  ValueFn jacobian_;
  NoisyFn noisy_;
  SampleSpace space_;
  std::string name_;
};

}  // namespace pmvr
