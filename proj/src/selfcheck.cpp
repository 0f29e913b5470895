#include "pmvr/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "pmvr/benchmarks.hpp"
#include "pmvr/error.hpp"

namespace pmvr {

namespace {

RandomSource test_rng(const SelfCheckOptions& o, std::uint64_t which) {
  return RandomSource(o.seed, stream_index(StreamPurpose::kTest, which, 0));
}

CheckResult make(const std::string& suite, const std::string& name, double measured, double tol,
                 std::string detail = {}) {
  return CheckResult{suite, name, measured <= tol, measured, tol, std::move(detail)};
}

void oracle_checks(const SelfCheckOptions& o, std::vector<CheckResult>& out) {
  const std::string suite = "oracles";
  {
    RandomSource rng = test_rng(o, 1);
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t d : {1u, 2u, 3u, 5u, 10u, 50u, 100u}) {
      for (int k = 0; k < 20; ++k) {
        const Point g = gaussian_sample(rng, 0.0, 1.0, Shape::vector(d));
        const double at_lmo = inner(lmo(Simplex{d}, g), g);
        for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, at_lmo - g[i]);
        ++cases;
      }
    }
    out.push_back(make(suite, "simplex-lmo-beats-every-vertex", worst, 0.0,
                       std::to_string(cases) + " directions, d <= 100"));
  }
  {
    const Point a = project_simplex(Point::vector({0.2, 0.4}));
    const Point b = project_simplex(Point::vector({5.0, 1.0}));
    const double err = std::max({std::abs(a[0] - 0.4), std::abs(a[1] - 0.6), std::abs(b[0] - 1.0),
                                 std::abs(b[1] - 0.0)});
    out.push_back(make(suite, "simplex-projection-hand-cases", err, 1e-12,
                       "(0.2,0.4)->(0.4,0.6), (5,1)->(1,0)"));
  }
  {
    RandomSource rng = test_rng(o, 2);
    double idem = 0.0, expand = 0.0;
    for (int k = 0; k < 200; ++k) {
      const std::size_t d = 2 + rng.uniform_index(49);
      const Point y = gaussian_sample(rng, 0.0, 9.0, Shape::vector(d));
      const Point z = gaussian_sample(rng, 0.0, 9.0, Shape::vector(d));
      const Point py = project_simplex(y);
      idem = std::max(idem, norm(project_simplex(py) - py));
      expand = std::max(expand, norm(py - project_simplex(z)) - norm(y - z));
    }
    out.push_back(make(suite, "simplex-projection-idempotent", idem, 1e-12, "200 points"));
    out.push_back(make(suite, "simplex-projection-non-expansive", expand, 1e-12, "200 pairs"));
  }
  {
    RandomSource rng = test_rng(o, 3);
    const NuclearNormBall ball{20, 15, 1.0};
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Point g = gaussian_sample(rng, 0.0, 1.0, Shape::matrix(20, 15));
      const double at_lmo = inner(lmo(ball, g), g);
      for (int j = 0; j < 100; ++j) {
        const double r = rng.uniform();
        const Point x = random_nuclear_point(rng, 20, 15, r * ball.radius);
        worst = std::max(worst, (at_lmo - inner(x, g)) / norm(g));
      }
    }
    out.push_back(make(suite, "nuclear-lmo-beats-feasible-points", worst, 1e-6,
                       "10 directions x 100 points, 20x15, relative to ||G||"));
  }
  {
    RandomSource rng = test_rng(o, 4);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const std::size_t m = 2 + rng.uniform_index(19), n = 2 + rng.uniform_index(14);
      const Point g = gaussian_sample(rng, 0.0, 1.0, Shape::matrix(m, n));
      const NuclearNormBall ball{m, n, 1.0};
      const double sigma_lmo = -inner(lmo(ball, g), g);
      const double sigma_svd = singular_values(g).front();
      worst = std::max(worst, std::abs(sigma_lmo - sigma_svd) / sigma_svd);
    }
    out.push_back(make(suite, "nuclear-lmo-matches-svd-sigma1", worst, 1e-6,
                       "50 matrices up to 20x15, relative"));
  }
}

void gradient_checks(const SelfCheckOptions& o, std::vector<CheckResult>& out) {
  auto data = std::make_shared<PortfolioData>(synthetic_returns({10, 500, o.seed}));
  SingleIndexConfig si;
  si.seed = o.seed;
  struct Case {
    std::string name;
    Benchmark bench;
  };
  std::vector<Case> cases{{"mean-variance", mean_variance_problem(data, 1.0)},
                          {"mean-deviation", mean_deviation_problem(data, 1.0)},
                          {"single-index", single_index_problem(si)}};
  RandomSource rng = test_rng(o, 5);
  for (const auto& c : cases) {
    const Shape shape = c.bench.problem->input_shape();
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Point x = shape.is_matrix ? random_nuclear_point(rng, shape.rows, shape.cols, 0.9)
                                      : random_simplex_point(rng, shape.rows);
      const Point g = exact_gradient(*c.bench.problem, x);
      const Point fd = finite_difference_gradient(*c.bench.problem, x, 1e-6);
      worst = std::max(worst, norm(g - fd) / std::max(norm(fd), 1e-300));
    }
    out.push_back(make("gradients", c.name + "-vs-central-differences", worst, 1e-5,
                       "5 feasible points, h = 1e-6, relative"));
  }
}

void subsolver_checks(const SelfCheckOptions& o, std::vector<CheckResult>& out) {
  const std::string suite = "subsolver";
  const std::size_t d = 10;
  const Simplex set{d};
  const double coeff = 1.0;
  const double d2 = diameter(set) * diameter(set);
  RandomSource rng = test_rng(o, 6);
  for (std::size_t n : {10u, 100u}) {
    double worst = -1e300;
    const double bound = 2.0 * coeff * d2 / (static_cast<double>(n) + 2.0);
    RandomSource local = rng.substream(stream_index(StreamPurpose::kTest, 6, n));
    for (int k = 0; k < 50; ++k) {
      const Point x = random_simplex_point(local, d);
      Point v(Shape::vector(d));
      for (auto& e : v.mutable_data()) e = 2.0 * local.uniform() - 1.0;
      const Point w = quadratic_fw_subsolve(v, x, coeff, n, set, o.gamma);
      const Point star = project(set, axpy(-1.0 / coeff, v, x));
      const double gap = subproblem_value(v, x, coeff, w) - subproblem_value(v, x, coeff, star);
      worst = std::max(worst, gap - bound);
    }
    out.push_back(make(suite, "certificate-N" + std::to_string(n), worst, 1e-9,
                       "max of gap - 2 coeff D^2/(N+2) over 50 pairs"));
  }
  {
    RandomSource local = test_rng(o, 7);
    const Point x = random_simplex_point(local, d);
    const Point v = gaussian_sample(local, 0.0, 1.0, Shape::vector(d));
    const Point w = quadratic_fw_subsolve(v, x, coeff, 1, set, o.gamma);
    const Point expected = lincomb(1.0 / 3.0, x, 2.0 / 3.0, lmo(set, v));
    out.push_back(make(suite, "single-inner-step", norm(w - expected), 1e-15,
                       "w2 = x/3 + 2 lmo(v)/3"));
  }
}

}  // namespace

Point random_simplex_point(RandomSource& rng, std::size_t d) {
  Point x(Shape::vector(d));
  double sum = 0.0;
  for (auto& e : x.mutable_data()) {
    e = -std::log(1.0 - rng.uniform());
    sum += e;
  }
  for (auto& e : x.mutable_data()) e /= sum;
  return x;
}

Point random_nuclear_point(RandomSource& rng, std::size_t m, std::size_t n, double radius) {
  const Point g = gaussian_sample(rng, 0.0, 1.0, Shape::matrix(m, n));
  return (radius / nuclear_norm(g)) * g;
}

Point finite_difference_gradient(const CompositionalProblem& problem, const Point& x, double h) {
  Point g(x.shape());
  Point probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = exact_objective(problem, probe);
    probe[i] = x[i] - h;
    const double down = exact_objective(problem, probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

std::vector<CheckResult> run_check_suite(const std::string& suite, const SelfCheckOptions& o) {
  std::vector<CheckResult> out;
  const bool all = suite == "all";
  if (!all && suite != "oracles" && suite != "gradients" && suite != "subsolver")
    throw InvalidArgument("unknown check suite '" + suite + "' (oracles, gradients, subsolver, all)");
  if (all || suite == "oracles") oracle_checks(o, out);
  if (all || suite == "gradients") gradient_checks(o, out);
  if (all || suite == "subsolver") subsolver_checks(o, out);
  return out;
}

std::string format_check(const CheckResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.3e <= %.1e", r.measured, r.tolerance);
  std::string line = std::string(r.passed ? "PASS " : "FAIL ") + r.suite + "/" + r.name + ": " + buf;
  if (!r.detail.empty()) line += " (" + r.detail + ")";
  return line;
}

}  // namespace pmvr
