#pragma once

#include <string>
#include <vector>

#include "pmvr/solvers.hpp"

namespace pmvr {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double measured = 0.0;   ///< worst observed error
  double tolerance = 0.0;
  std::string detail;
};

struct SelfCheckOptions {
  GammaRule gamma = GammaRule::kClassic;  ///< kHalf is the negative control
  std::uint64_t seed = 20240607;
};

/// suite: oracles | gradients | subsolver | all. Throws InvalidArgument on
/// an unknown suite name.
std::vector<CheckResult> run_check_suite(const std::string& suite,
                                         const SelfCheckOptions& options = {});
/// "PASS oracles/simplex-lmo-vertices: 0 <= 0 (detail)".
std::string format_check(const CheckResult& result);

/// Random point of the probability simplex.
Point random_simplex_point(RandomSource& rng, std::size_t d);
/// Random m x n matrix with nuclear norm exactly `radius`.
Point random_nuclear_point(RandomSource& rng, std::size_t m, std::size_t n, double radius);
/// Central differences of F with step h.
Point finite_difference_gradient(const CompositionalProblem& problem, const Point& x, double h);

}  // namespace pmvr
