#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "pmvr/point.hpp"

namespace pmvr {

/// Probability simplex {x >= 0, sum x = 1} in R^d.
struct Simplex {
  std::size_t dim = 0;
};

/// {X in R^{m x n} : ||X||_* <= radius}. The LMO runs power iteration from a
/// fixed start vector drawn from `start_seed`, so it is a pure function.
struct NuclearNormBall {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double radius = 1.0;
  std::uint64_t start_seed = 0;
  double power_tol = 1e-8;
  int power_max_iter = 1000;
};

/// Axis-aligned box lower <= x <= upper (same shape for both bounds).
struct Box {
  Point lower;
  Point upper;
};

using FeasibleSet = std::variant<Simplex, NuclearNormBall, Box>;

Box make_box(Point lower, Point upper);

Shape ambient_shape(const FeasibleSet& set);
/// max distance between two points of the set.
double diameter(const FeasibleSet& set);
std::string describe(const FeasibleSet& set);

/// A minimizer of <x, direction> over the set.
Point lmo(const FeasibleSet& set, const Point& direction);
/// Euclidean projection onto the set.
Point project(const FeasibleSet& set, const Point& point);
bool contains(const FeasibleSet& set, const Point& point, double tol);

/// Euclidean projection onto {x >= 0, sum x = radius} by sort-and-threshold.
Point project_simplex(const Point& y, double radius = 1.0);

struct SingularPair {
  double sigma = 0.0;
  Point u;  ///< unit left vector (m)
  Point v;  ///< unit right vector (n)
  int iterations = 0;
};

/// Largest singular triple by alternating power iteration started at `start`
/// (unit n-vector). Throws ConvergenceError carrying the best residual when
/// max_iter passes without ||M^T u - sigma v|| <= tol * sigma.
SingularPair top_singular_pair(const Point& matrix, const Point& start, double tol, int max_iter);
/// Same, with the start vector drawn from the power-iteration substream of `seed`.
SingularPair top_singular_pair(const Point& matrix, double tol = 1e-8, int max_iter = 1000,
                               std::uint64_t seed = 0);

/// Singular values (descending) by a dense SVD; the reference route.
std::vector<double> singular_values(const Point& matrix);
double nuclear_norm(const Point& matrix);

}  // namespace pmvr
