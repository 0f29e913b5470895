#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmvr/feasible_set.hpp"
#include "pmvr/problem.hpp"

namespace pmvr {

/// Per-period asset returns in fractional units.
struct PortfolioData {
  Point returns;  ///< periods x assets
  Point mean;     ///< column means
  std::vector<std::string> names;
  std::string source;
  std::size_t periods() const noexcept { return returns.rows(); }
  std::size_t assets() const noexcept { return returns.cols(); }
};

/// Wraps a periods x assets matrix and computes the column means.
PortfolioData make_portfolio_data(Point returns, std::vector<std::string> names = {},
                                  std::string source = "memory");

struct SyntheticReturnsConfig {
  std::size_t assets = 10;
  std::size_t periods = 500;
  std::uint64_t seed = 0;
  double market_vol = 0.04;  ///< one-factor market std
  double mean_low = 0.002;   ///< asset means uniform in [mean_low, mean_high]
  double mean_high = 0.01;
  double idio_low = 0.02;  ///< idiosyncratic std uniform in [idio_low, idio_high]
  double idio_high = 0.05;
};

/// One-factor model r_t = mu + b f_t + e_t.
PortfolioData synthetic_returns(const SyntheticReturnsConfig& config);

/// A problem, its feasible set and a feasible start point.
struct Benchmark {
  std::shared_ptr<const CompositionalProblem> problem;
  FeasibleSet set;
  Point x0;
};

/// K=2: f1(x) = (-<r_t, x>, x), f2(y1, y2) = y1 + lambda (<r_t, y2> + y1)^2.
/// Periods are sampled uniformly. Starts at the simplex barycenter.
Benchmark mean_variance_problem(std::shared_ptr<const PortfolioData> data, double lambda);

/// Smoothing inside the square root of the deviation term.
constexpr double kDeviationDelta = 1e-12;

/// K=3 negated mean-deviation objective:
/// g1(x) = (<r_t, x>, x), g2(y1, y2) = (y1, (<r_t, y2> - y1)^2),
/// g3(z1, z2) = -z1 + lambda sqrt(max(z2, 0) + delta).
Benchmark mean_deviation_problem(std::shared_ptr<const PortfolioData> data, double lambda);

/// Direct single-formula objectives, used to check the decompositions.
double mean_variance_direct(const PortfolioData& data, double lambda, const Point& x);
double mean_deviation_direct(const PortfolioData& data, double lambda, const Point& x);

struct SingleIndexConfig {
  std::size_t rows = 20;
  std::size_t cols = 20;
  double radius = 1.0;  ///< nuclear-ball radius s
  double sigma = 0.1;   ///< observation noise std
  std::uint64_t seed = 0;
  std::optional<Point> b_star;  ///< drawn from `seed` when absent
};

/// Rank-one ground truth of unit nuclear norm: v v^T / ||v||^2 when square,
/// u v^T / (||u|| ||v||) otherwise.
Point single_index_ground_truth(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// K=1 loss E[(y - <A, B>^2)^2] with A = I + E, E_ij ~ N(0, 0.3) and
/// y = <A, B*>^2 + N(0, sigma^2), both drawn fresh per sample key. The exact
/// oracle is the closed-form Gaussian expectation. Starts at s * I / min(m, n).
Benchmark single_index_problem(const SingleIndexConfig& config);

/// The (A, y) pair a sample key maps to.
struct SingleIndexDraw {
  Point a;
  double y;
};
SingleIndexDraw single_index_draw(const SingleIndexConfig& config, const Point& b_star,
                                  Sample key);

struct QuadraticToyConfig {
  Point center;               ///< c; F(x) = ||x - c||^2 over the simplex
  double value_noise = 0.1;   ///< std of the f1 perturbation
  double outer_noise = 0.1;   ///< std of the f2 value and Jacobian perturbation
};

/// K=2 noisy toy: f1(x; xi) = x - c + s1 xi, f2(y; zeta) = ||y||^2 + s2 zeta_0 with
/// Jacobian 2y + s2 zeta. Strongly convex (lambda = 2) with F* from the projection of c.
/// Starts at the first vertex.
Benchmark quadratic_toy(const QuadraticToyConfig& config);

}  // namespace pmvr
