#include <gtest/gtest.h>

#include <cmath>

#include "pmvr/benchmarks.hpp"
#include "pmvr/error.hpp"
#include "pmvr/selfcheck.hpp"
#include "test_problems.hpp"

namespace pmvr {
namespace {

TEST(MeanVariance, TwoPeriodHandValue) {
  const Benchmark b = mean_variance_problem(testing::two_period_data(), 1.0);
  const Point x = Point::vector({0.5, 0.5});
  EXPECT_DOUBLE_EQ(exact_objective(*b.problem, x), -0.5);
  EXPECT_DOUBLE_EQ(mean_variance_direct(*testing::two_period_data(), 1.0, x), -0.5);
  EXPECT_EQ(b.x0, x);
  EXPECT_EQ(b.problem->depth(), 2u);
}

TEST(MeanVariance, RiskOffIsLinear) {
  auto data = std::make_shared<PortfolioData>(synthetic_returns({6, 40, 2}));
  const Benchmark b = mean_variance_problem(data, 0.0);
  RandomSource rng(3);
  const Point x = random_simplex_point(rng, 6);
  EXPECT_NEAR(exact_objective(*b.problem, x), -inner(data->mean, x), 1e-15);
  EXPECT_LT(norm(exact_gradient(*b.problem, x) + data->mean), 1e-15);
}

TEST(MeanVariance, CompositionMatchesDirectFormula) {
  auto data = std::make_shared<PortfolioData>(synthetic_returns({10, 500, 4}));
  const Benchmark b = mean_variance_problem(data, 1.0);
  RandomSource rng(5);
  for (int i = 0; i < 20; ++i) {
    const Point x = random_simplex_point(rng, 10);
    EXPECT_NEAR(exact_objective(*b.problem, x), mean_variance_direct(*data, 1.0, x), 1e-12);
  }
}

TEST(MeanVariance, StochasticOraclesAverageToExact) {
  auto data = std::make_shared<PortfolioData>(synthetic_returns({4, 30, 6}));
  const Benchmark b = mean_variance_problem(data, 1.5);
  RandomSource rng(6);
  const Point x = random_simplex_point(rng, 4);
  const auto chain = exact_inner_values(*b.problem, x);
  for (std::size_t i = 0; i < 2; ++i) {
    const Level& level = b.problem->level(i);
    const Point& in = i == 0 ? x : chain[0];
    const auto samples = enumerate_samples(level);
    Point value(Shape::vector(level.output_dim()));
    Point jac(Shape::matrix(level.input_shape().size(), level.output_dim()));
    for (Sample s : samples) {
      const Evaluation e = level.evaluate(in, s);
      value = value + e.value;
      jac = jac + e.jacobian;
    }
    const double inv = 1.0 / static_cast<double>(samples.size());
    EXPECT_LT(norm(inv * value - level.exact_value(in)), 1e-13);
    EXPECT_LT(norm(inv * jac - level.exact_jacobian(in)), 1e-13);
  }
}

TEST(MeanDeviation, TwoPeriodHandValue) {
  const Benchmark b = mean_deviation_problem(testing::two_period_data(), 1.0);
  const Point x = Point::vector({0.5, 0.5});
  EXPECT_NEAR(exact_objective(*b.problem, x), -0.5, std::sqrt(kDeviationDelta) + 1e-15);
  EXPECT_DOUBLE_EQ(mean_deviation_direct(*testing::two_period_data(), 1.0, x), -0.5);
  EXPECT_EQ(b.problem->depth(), 3u);
}

TEST(MeanDeviation, ConstantReturnsDropTheRiskTerm) {
  const auto data = std::make_shared<PortfolioData>(
      make_portfolio_data(Point::matrix(3, 2, {0.1, 0.3, 0.1, 0.3, 0.1, 0.3})));
  const Benchmark b = mean_deviation_problem(data, 2.0);
  const Point x = Point::vector({0.25, 0.75});
  EXPECT_NEAR(exact_objective(*b.problem, x), -0.25, 2.0 * std::sqrt(kDeviationDelta) + 1e-15);
}

TEST(MeanDeviation, CompositionMatchesDirectFormula) {
  auto data = std::make_shared<PortfolioData>(synthetic_returns({10, 500, 7}));
  const Benchmark b = mean_deviation_problem(data, 1.0);
  RandomSource rng(8);
  for (int i = 0; i < 20; ++i) {
    const Point x = random_simplex_point(rng, 10);
    EXPECT_NEAR(exact_objective(*b.problem, x), mean_deviation_direct(*data, 1.0, x), 1e-6);
  }
}

TEST(Portfolio, RejectsBadInputs) {
  EXPECT_THROW(mean_variance_problem(testing::two_period_data(), -1.0), InvalidArgument);
  EXPECT_THROW(mean_variance_problem(nullptr, 1.0), InvalidArgument);
  EXPECT_THROW(synthetic_returns({1, 10, 0}), InvalidArgument);
}

TEST(SyntheticReturns, DeterministicAndPlausible) {
  const PortfolioData a = synthetic_returns({10, 500, 1});
  EXPECT_EQ(a.returns, synthetic_returns({10, 500, 1}).returns);
  EXPECT_NE(a.returns, synthetic_returns({10, 500, 2}).returns);
  EXPECT_EQ(a.periods(), 500u);
  EXPECT_EQ(a.assets(), 10u);
  for (std::size_t j = 0; j < 10; ++j) {
    double s = 0.0;
    for (std::size_t t = 0; t < 500; ++t) s += a.returns(t, j);
    EXPECT_NEAR(a.mean[j], s / 500.0, 1e-15);
    EXPECT_LT(std::abs(a.mean[j]), 0.05);
  }
}

TEST(SingleIndex, GroundTruthHasUnitNuclearNorm) {
  EXPECT_NEAR(nuclear_norm(single_index_ground_truth(20, 20, 3)), 1.0, 1e-12);
  EXPECT_NEAR(nuclear_norm(single_index_ground_truth(8, 5, 3)), 1.0, 1e-12);
  const Point sq = single_index_ground_truth(6, 6, 1);
  EXPECT_LT(norm(sq - transpose(sq)), 1e-15);
}

TEST(SingleIndex, NoiselessTruthHasZeroLoss) {
  SingleIndexConfig c;
  c.rows = 6;
  c.cols = 6;
  c.sigma = 0.0;
  c.seed = 4;
  const Benchmark b = single_index_problem(c);
  const Point truth = single_index_ground_truth(6, 6, 4);
  for (Sample s = 0; s < 20; ++s) EXPECT_NEAR(b.problem->level(0).evaluate(truth, s).value[0], 0.0, 1e-20);
  EXPECT_NEAR(exact_objective(*b.problem, truth), 0.0, 1e-10);
}

TEST(SingleIndex, OptimalValueIsNoiseVariance) {
  SingleIndexConfig c;
  c.sigma = 0.1;
  const Benchmark b = single_index_problem(c);
  EXPECT_NEAR(*b.problem->metadata().optimal_value, 0.01, 1e-15);
  EXPECT_NEAR(exact_objective(*b.problem, single_index_ground_truth(20, 20, 0)), 0.01, 1e-12);
}

TEST(SingleIndex, AnalyticOracleMatchesMonteCarlo) {
  SingleIndexConfig c;
  c.rows = 4;
  c.cols = 3;
  c.sigma = 0.2;
  c.seed = 9;
  const Benchmark b = single_index_problem(c);
  RandomSource rng(10);
  const Point x = random_nuclear_point(rng, 4, 3, 0.8);
  const int n = 200000;
  double mean = 0.0, sq = 0.0;
  Point g(Shape::matrix(4, 3));
  for (int s = 0; s < n; ++s) {
    const Evaluation e = b.problem->level(0).evaluate(x, static_cast<Sample>(s) * 7919u + 1u);
    mean += e.value[0];
    sq += e.value[0] * e.value[0];
    g = g + e.jacobian.reshaped(Shape::matrix(4, 3));
  }
  mean /= n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_NEAR(mean, exact_objective(*b.problem, x), 5.0 * se);
  const Point exact_g = exact_gradient(*b.problem, x);
  EXPECT_LT(norm((1.0 / n) * g - exact_g), 0.05 * norm(exact_g) + 1e-3);
}

TEST(SingleIndex, SampleJacobianMatchesFiniteDifference) {
  SingleIndexConfig c;
  c.rows = 5;
  c.cols = 4;
  const Benchmark b = single_index_problem(c);
  RandomSource rng(11);
  const Point x = random_nuclear_point(rng, 5, 4, 0.7);
  const Level& level = b.problem->level(0);
  const Sample key = 12345;
  const Point jac = level.evaluate(x, key).jacobian;
  Point fd(Shape::vector(20));
  Point probe = x;
  for (std::size_t i = 0; i < 20; ++i) {
    probe[i] = x[i] + 1e-6;
    const double up = level.evaluate(probe, key).value[0];
    probe[i] = x[i] - 1e-6;
    const double down = level.evaluate(probe, key).value[0];
    probe[i] = x[i];
    fd[i] = (up - down) / 2e-6;
  }
  EXPECT_LT(norm(jac.reshaped(Shape::vector(20)) - fd), 1e-5 * norm(fd));
}

TEST(SingleIndex, StartsAtScaledIdentity) {
  SingleIndexConfig c;
  c.rows = 4;
  c.cols = 6;
  c.radius = 2.0;
  const Benchmark b = single_index_problem(c);
  EXPECT_EQ(b.x0, 0.5 * Point::identity(4, 6));
  EXPECT_TRUE(contains(b.set, b.x0, 1e-12));
}

TEST(QuadraticToy, MetadataAndNoise) {
  QuadraticToyConfig c;
  c.center = Point::vector({2.0, -1.0});
  const Benchmark b = quadratic_toy(c);
  // project(2, -1) = (1, 0), F* = 1 + 1 = 2.
  EXPECT_NEAR(*b.problem->metadata().optimal_value, 2.0, 1e-15);
  EXPECT_EQ(*b.problem->metadata().strong_convexity, 2.0);
  const Level& f1 = b.problem->level(0);
  EXPECT_NE(f1.evaluate(b.x0, 1).value, f1.evaluate(b.x0, 2).value);
  EXPECT_EQ(f1.evaluate(b.x0, 1).value, f1.evaluate(b.x0, 1).value);
}

}  // namespace
}  // namespace pmvr
