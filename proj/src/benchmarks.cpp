#include "pmvr/benchmarks.hpp"

#include <cmath>

#include "pmvr/error.hpp"
#include "pmvr/random.hpp"

namespace pmvr {

namespace {

using DataPtr = std::shared_ptr<const PortfolioData>;

const double* row_of(const PortfolioData& data, std::size_t t) {
  return data.returns.data().data() + t * data.assets();
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void check_input(const Point& x, Shape shape, const char* name) {
  if (x.shape() != shape) throw ShapeError(std::string(name) + ": input " + x.shape().str());
}

std::size_t period(const PortfolioData& data, Sample s) {
  if (s >= data.periods()) throw InvalidArgument("portfolio sample index out of range");
  return static_cast<std::size_t>(s);
}

// (sign <r, x>, x) with Jacobian d x (d+1).
class LinearLiftLevel final : public Level {
 public:
  LinearLiftLevel(DataPtr data, double sign, std::string name)
      : data_(std::move(data)), sign_(sign), name_(std::move(name)) {}
  Shape input_shape() const override { return Shape::vector(data_->assets()); }
  std::size_t output_dim() const override { return data_->assets() + 1; }
  SampleSpace sample_space() const override { return SampleSpace::finite(data_->periods()); }
  Evaluation evaluate(const Point& x, Sample s) const override {
    check_input(x, input_shape(), name_.c_str());
    return build(x, row_of(*data_, period(*data_, s)));
  }
  Point exact_value(const Point& x) const override {
    check_input(x, input_shape(), name_.c_str());
    return build(x, data_->mean.data().data()).value;
  }
  Point exact_jacobian(const Point& x) const override {
    check_input(x, input_shape(), name_.c_str());
    return build(x, data_->mean.data().data()).jacobian;
  }
  std::string name() const override { return name_; }

 private:
  Evaluation build(const Point& x, const double* r) const {
    const std::size_t d = data_->assets();
    Point value(Shape::vector(d + 1));
    value[0] = sign_ * dot(r, x.data().data(), d);
    for (std::size_t j = 0; j < d; ++j) value[j + 1] = x[j];
    Point jac(Shape::matrix(d, d + 1));
    for (std::size_t j = 0; j < d; ++j) {
      jac(j, 0) = sign_ * r[j];
      jac(j, j + 1) = 1.0;
    }
    return {std::move(value), std::move(jac)};
  }

  DataPtr data_;
  double sign_;
  std::string name_;
};

// y1 + lambda (<r_t, y2> + y1)^2.
class MeanVarianceOuter final : public Level {
 public:
  MeanVarianceOuter(DataPtr data, double lambda) : data_(std::move(data)), lambda_(lambda) {}
  Shape input_shape() const override { return Shape::vector(data_->assets() + 1); }
  std::size_t output_dim() const override { return 1; }
  SampleSpace sample_space() const override { return SampleSpace::finite(data_->periods()); }
  Evaluation evaluate(const Point& y, Sample s) const override {
    check_input(y, input_shape(), "mean-variance f2");
    const std::size_t d = data_->assets();
    const double* r = row_of(*data_, period(*data_, s));
    const double w = dot(r, y.data().data() + 1, d) + y[0];
    Point jac(Shape::matrix(d + 1, 1));
    jac[0] = 1.0 + 2.0 * lambda_ * w;
    for (std::size_t j = 0; j < d; ++j) jac[j + 1] = 2.0 * lambda_ * w * r[j];
    return {Point::vector({y[0] + lambda_ * w * w}), std::move(jac)};
  }
  Point exact_value(const Point& y) const override { return exact(y).value; }
  Point exact_jacobian(const Point& y) const override { return exact(y).jacobian; }
  std::string name() const override { return "mean-variance f2"; }

 private:
  Evaluation exact(const Point& y) const {
    check_input(y, input_shape(), "mean-variance f2");
    const std::size_t d = data_->assets(), n = data_->periods();
    double sum_w = 0.0, sum_w2 = 0.0;
    std::vector<double> sum_wr(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double* r = row_of(*data_, t);
      const double w = dot(r, y.data().data() + 1, d) + y[0];
      sum_w += w;
      sum_w2 += w * w;
      for (std::size_t j = 0; j < d; ++j) sum_wr[j] += w * r[j];
    }
    const double inv = 1.0 / static_cast<double>(n);
    Point jac(Shape::matrix(d + 1, 1));
    jac[0] = 1.0 + 2.0 * lambda_ * sum_w * inv;
    for (std::size_t j = 0; j < d; ++j) jac[j + 1] = 2.0 * lambda_ * sum_wr[j] * inv;
    return {Point::vector({y[0] + lambda_ * sum_w2 * inv}), std::move(jac)};
  }

  DataPtr data_;
  double lambda_;
};

// (y1, (<r_t, y2> - y1)^2).
class DeviationMiddle final : public Level {
 public:
  explicit DeviationMiddle(DataPtr data) : data_(std::move(data)) {}
  Shape input_shape() const override { return Shape::vector(data_->assets() + 1); }
  std::size_t output_dim() const override { return 2; }
  SampleSpace sample_space() const override { return SampleSpace::finite(data_->periods()); }
  Evaluation evaluate(const Point& y, Sample s) const override {
    check_input(y, input_shape(), "mean-deviation g2");
    const std::size_t d = data_->assets();
    const double* r = row_of(*data_, period(*data_, s));
    const double e = dot(r, y.data().data() + 1, d) - y[0];
    Point jac(Shape::matrix(d + 1, 2));
    jac(0, 0) = 1.0;
    jac(0, 1) = -2.0 * e;
    for (std::size_t j = 0; j < d; ++j) jac(j + 1, 1) = 2.0 * e * r[j];
    return {Point::vector({y[0], e * e}), std::move(jac)};
  }
  Point exact_value(const Point& y) const override { return exact(y).value; }
  Point exact_jacobian(const Point& y) const override { return exact(y).jacobian; }
  std::string name() const override { return "mean-deviation g2"; }

 private:
  Evaluation exact(const Point& y) const {
    check_input(y, input_shape(), "mean-deviation g2");
    const std::size_t d = data_->assets(), n = data_->periods();
    double sum_e = 0.0, sum_e2 = 0.0;
    std::vector<double> sum_er(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double* r = row_of(*data_, t);
      const double e = dot(r, y.data().data() + 1, d) - y[0];
      sum_e += e;
      sum_e2 += e * e;
      for (std::size_t j = 0; j < d; ++j) sum_er[j] += e * r[j];
    }
    const double inv = 1.0 / static_cast<double>(n);
    Point jac(Shape::matrix(d + 1, 2));
    jac(0, 0) = 1.0;
    jac(0, 1) = -2.0 * sum_e * inv;
    for (std::size_t j = 0; j < d; ++j) jac(j + 1, 1) = 2.0 * sum_er[j] * inv;
    return {Point::vector({y[0], sum_e2 * inv}), std::move(jac)};
  }

  DataPtr data_;
};

// -z1 + lambda sqrt(max(z2, 0) + delta). Deterministic.
class DeviationOuter final : public Level {
 public:
  explicit DeviationOuter(double lambda) : lambda_(lambda) {}
  Shape input_shape() const override { return Shape::vector(2); }
  std::size_t output_dim() const override { return 1; }
  SampleSpace sample_space() const override { return SampleSpace::finite(1); }
  Evaluation evaluate(const Point& z, Sample) const override {
    return {exact_value(z), exact_jacobian(z)};
  }
  Point exact_value(const Point& z) const override {
    check_input(z, input_shape(), "mean-deviation g3");
    return Point::vector({-z[0] + lambda_ * std::sqrt(std::max(z[1], 0.0) + kDeviationDelta)});
  }
  Point exact_jacobian(const Point& z) const override {
    check_input(z, input_shape(), "mean-deviation g3");
    const double root = std::sqrt(std::max(z[1], 0.0) + kDeviationDelta);
    return Point::matrix(2, 1, {-1.0, z[1] >= 0.0 ? lambda_ / (2.0 * root) : 0.0});
  }
  std::string name() const override { return "mean-deviation g3"; }

 private:
  double lambda_;
};

constexpr double kDesignVariance = 0.3;

class SingleIndexLevel final : public Level {
 public:
  SingleIndexLevel(SingleIndexConfig config, Point b_star)
      : config_(std::move(config)),
        b_star_(std::move(b_star)),
        identity_(Point::identity(config_.rows, config_.cols)),
        mu_b_(inner(identity_, b_star_)),
        q_(kDesignVariance * squared_norm(b_star_)) {}
  Shape input_shape() const override { return Shape::matrix(config_.rows, config_.cols); }
  std::size_t output_dim() const override { return 1; }
  SampleSpace sample_space() const override { return SampleSpace::generative(); }
  Evaluation evaluate(const Point& b, Sample s) const override {
    check_input(b, input_shape(), "single-index");
    const SingleIndexDraw draw = single_index_draw(config_, b_star_, s);
    const double a = inner(draw.a, b);
    const double r = draw.y - a * a;
    Point jac = (-4.0 * r * a) * draw.a;
    return {Point::vector({r * r}), jac.reshaped(Shape::matrix(b.size(), 1))};
  }
  Point exact_value(const Point& b) const override {
    const Moments m = moments(b);
    const double ea4 = std::pow(m.mu_a, 4) + 6.0 * m.mu_a * m.mu_a * m.p + 3.0 * m.p * m.p;
    const double eb4 = std::pow(mu_b_, 4) + 6.0 * mu_b_ * mu_b_ * q_ + 3.0 * q_ * q_;
    const double ea2b2 = m.mu_a * m.mu_a * mu_b_ * mu_b_ + m.mu_a * m.mu_a * q_ +
                         mu_b_ * mu_b_ * m.p + 4.0 * m.mu_a * mu_b_ * m.c + m.p * q_ +
                         2.0 * m.c * m.c;
    return Point::vector({eb4 - 2.0 * ea2b2 + ea4 + config_.sigma * config_.sigma});
  }
  Point exact_jacobian(const Point& b) const override {
    const Moments m = moments(b);
    const double d_mu = -2.0 * (2.0 * m.mu_a * mu_b_ * mu_b_ + 2.0 * m.mu_a * q_ + 4.0 * mu_b_ * m.c) +
                        4.0 * std::pow(m.mu_a, 3) + 12.0 * m.mu_a * m.p;
    const double d_p = -2.0 * (mu_b_ * mu_b_ + q_) + 6.0 * m.mu_a * m.mu_a + 6.0 * m.p;
    const double d_c = -2.0 * (4.0 * m.mu_a * mu_b_ + 4.0 * m.c);
    Point g = d_mu * identity_;
    g = axpy(2.0 * kDesignVariance * d_p, b, g);
    g = axpy(kDesignVariance * d_c, b_star_, g);
    return g.reshaped(Shape::matrix(b.size(), 1));
  }
  std::string name() const override { return "single-index"; }

 private:
  struct Moments {
    double mu_a, p, c;
  };
  Moments moments(const Point& b) const {
    check_input(b, input_shape(), "single-index");
    return {inner(identity_, b), kDesignVariance * squared_norm(b),
            kDesignVariance * inner(b, b_star_)};
  }

  SingleIndexConfig config_;
  Point b_star_;
  Point identity_;
  double mu_b_;
  double q_;
};

}  // namespace

PortfolioData make_portfolio_data(Point returns, std::vector<std::string> names,
                                  std::string source) {
  if (!returns.shape().is_matrix || returns.rows() == 0 || returns.cols() == 0)
    throw InvalidArgument("portfolio data: need a non-empty periods x assets matrix");
  if (!names.empty() && names.size() != returns.cols())
    throw InvalidArgument("portfolio data: one name per asset");
  returns.check_finite("portfolio returns");
  const std::size_t n = returns.rows(), d = returns.cols();
  Point mean(Shape::vector(d));
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) mean[j] += returns(t, j);
  for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
  return PortfolioData{std::move(returns), std::move(mean), std::move(names), std::move(source)};
}

PortfolioData synthetic_returns(const SyntheticReturnsConfig& config) {
  if (config.assets < 2 || config.periods == 0)
    throw InvalidArgument("synthetic returns: need at least 2 assets and 1 period");
  RandomSource rng(config.seed, stream_index(StreamPurpose::kDataGeneration, 0, 0));
  const std::size_t d = config.assets;
  std::vector<double> mu(d), load(d), idio(d);
  for (std::size_t j = 0; j < d; ++j) {
    mu[j] = config.mean_low + (config.mean_high - config.mean_low) * rng.uniform();
    load[j] = 0.5 + rng.uniform();
    idio[j] = config.idio_low + (config.idio_high - config.idio_low) * rng.uniform();
  }
  Point r(Shape::matrix(config.periods, d));
  for (std::size_t t = 0; t < config.periods; ++t) {
    const double f = config.market_vol * rng.normal();
    for (std::size_t j = 0; j < d; ++j) r(t, j) = mu[j] + load[j] * f + idio[j] * rng.normal();
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("A" + std::to_string(j + 1));
  return make_portfolio_data(std::move(r), std::move(names),
                             "synthetic(seed=" + std::to_string(config.seed) + ")");
}

namespace {

Point barycenter(std::size_t d) { return Point(Shape::vector(d), 1.0 / static_cast<double>(d)); }

void check_portfolio_args(const DataPtr& data, double lambda) {
  if (!data) throw InvalidArgument("portfolio problem: empty data");
  if (data->assets() < 2) throw InvalidArgument("portfolio problem: need d >= 2");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("portfolio problem: lambda must be >= 0");
}

}  // namespace

Benchmark mean_variance_problem(std::shared_ptr<const PortfolioData> data, double lambda) {
  check_portfolio_args(data, lambda);
  const std::size_t d = data->assets();
  std::vector<LevelPtr> levels{std::make_shared<LinearLiftLevel>(data, -1.0, "mean-variance f1"),
                               std::make_shared<MeanVarianceOuter>(data, lambda)};
  auto problem = std::make_shared<CompositionalProblem>(std::move(levels), ProblemMetadata{},
                                                        "mean_variance");
  return Benchmark{std::move(problem), Simplex{d}, barycenter(d)};
}

Benchmark mean_deviation_problem(std::shared_ptr<const PortfolioData> data, double lambda) {
  check_portfolio_args(data, lambda);
  const std::size_t d = data->assets();
  std::vector<LevelPtr> levels{std::make_shared<LinearLiftLevel>(data, 1.0, "mean-deviation g1"),
                               std::make_shared<DeviationMiddle>(data),
                               std::make_shared<DeviationOuter>(lambda)};
  auto problem = std::make_shared<CompositionalProblem>(std::move(levels), ProblemMetadata{},
                                                        "mean_deviation");
  return Benchmark{std::move(problem), Simplex{d}, barycenter(d)};
}

double mean_variance_direct(const PortfolioData& data, double lambda, const Point& x) {
  const std::size_t d = data.assets(), n = data.periods();
  const double mean_ret = dot(data.mean.data().data(), x.data().data(), d);
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = dot(row_of(data, t), x.data().data(), d) - mean_ret;
    var += e * e;
  }
  return -mean_ret + lambda * var / static_cast<double>(n);
}

double mean_deviation_direct(const PortfolioData& data, double lambda, const Point& x) {
  const std::size_t d = data.assets(), n = data.periods();
  const double mean_ret = dot(data.mean.data().data(), x.data().data(), d);
  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double e = dot(row_of(data, t), x.data().data(), d) - mean_ret;
    var += e * e;
  }
  return -(mean_ret - lambda * std::sqrt(var / static_cast<double>(n)));
}

Point single_index_ground_truth(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  RandomSource rng(seed, stream_index(StreamPurpose::kDataGeneration, 1, 0));
  const Point u = gaussian_sample(rng, 0.0, 1.0, Shape::vector(rows));
  const Point v = rows == cols ? u : gaussian_sample(rng, 0.0, 1.0, Shape::vector(cols));
  const double scale = 1.0 / (norm(u) * norm(v));
  Point b(Shape::matrix(rows, cols));
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) b(r, c) = scale * u[r] * v[c];
  return b;
}

SingleIndexDraw single_index_draw(const SingleIndexConfig& config, const Point& b_star,
                                  Sample key) {
  RandomSource rng(key, stream_index(StreamPurpose::kDataGeneration, 2, 0));
  Point a = gaussian_sample(rng, 0.0, kDesignVariance, Shape::matrix(config.rows, config.cols));
  for (std::size_t i = 0; i < std::min(config.rows, config.cols); ++i) a(i, i) += 1.0;
  const double b = inner(a, b_star);
  const double noise = config.sigma > 0.0 ? config.sigma * rng.normal() : 0.0;
  return {std::move(a), b * b + noise};
}

Benchmark single_index_problem(const SingleIndexConfig& config) {
  if (config.rows < 2 || config.cols < 2)
    throw InvalidArgument("single-index: m and n must be at least 2");
  if (!(config.sigma >= 0.0)) throw InvalidArgument("single-index: sigma must be >= 0");
  if (!(config.radius > 0.0)) throw InvalidArgument("single-index: radius must be positive");
  Point b_star =
      config.b_star ? *config.b_star : single_index_ground_truth(config.rows, config.cols, config.seed);
  if (b_star.shape() != Shape::matrix(config.rows, config.cols))
    throw ShapeError("single-index: B* has shape " + b_star.shape().str());
  if (nuclear_norm(b_star) > config.radius + 1e-9)
    throw InvalidArgument("single-index: B* lies outside the nuclear ball");
  ProblemMetadata meta;
  meta.optimal_value = config.sigma * config.sigma;
  meta.optimal_value_exact = true;
  std::vector<LevelPtr> levels{std::make_shared<SingleIndexLevel>(config, b_star)};
  auto problem =
      std::make_shared<CompositionalProblem>(std::move(levels), meta, "single_index");
  NuclearNormBall ball{config.rows, config.cols, config.radius, config.seed};
  const double diag = config.radius / static_cast<double>(std::min(config.rows, config.cols));
  return Benchmark{std::move(problem), ball, diag * Point::identity(config.rows, config.cols)};
}

Benchmark quadratic_toy(const QuadraticToyConfig& config) {
  const Point c = config.center;
  if (c.shape().is_matrix || c.size() < 1) throw InvalidArgument("quadratic toy: need a center vector");
  if (!(config.value_noise >= 0.0) || !(config.outer_noise >= 0.0))
    throw InvalidArgument("quadratic toy: noise levels must be >= 0");
  const std::size_t d = c.size();
  const Shape shape = Shape::vector(d);
  const double s1 = config.value_noise, s2 = config.outer_noise;

  auto inner_level = std::make_shared<FunctionLevel>(
      shape, d, [c](const Point& x) { return x - c; },
      [d](const Point&) { return Point::identity(d, d); },
      [c, d, s1](const Point& x, Sample key) {
        RandomSource rng(key, stream_index(StreamPurpose::kDataGeneration, 3, 0));
        Point value = axpy(s1, gaussian_sample(rng, 0.0, 1.0, Shape::vector(d)), x - c);
        return Evaluation{std::move(value), Point::identity(d, d)};
      },
      SampleSpace::generative(), "toy f1");
  auto outer_level = std::make_shared<FunctionLevel>(
      shape, 1, [](const Point& y) { return Point::vector({squared_norm(y)}); },
      [d](const Point& y) { return (2.0 * y).reshaped(Shape::matrix(d, 1)); },
      [d, s2](const Point& y, Sample key) {
        RandomSource rng(key, stream_index(StreamPurpose::kDataGeneration, 4, 0));
        const Point zeta = gaussian_sample(rng, 0.0, 1.0, Shape::vector(d));
        const Point value = Point::vector({squared_norm(y) + s2 * zeta[0]});
        return Evaluation{value, axpy(s2, zeta, 2.0 * y).reshaped(Shape::matrix(d, 1))};
      },
      SampleSpace::generative(), "toy f2");

  ProblemMetadata meta;
  meta.optimal_value = squared_norm(project_simplex(c) - c);
  meta.optimal_value_exact = true;
  meta.strong_convexity = 2.0;
  meta.smoothness_beta = 2.0;
  auto problem = std::make_shared<CompositionalProblem>(
      std::vector<LevelPtr>{inner_level, outer_level}, meta, "quadratic_toy");
  Point x0(shape);
  x0[0] = 1.0;
  return Benchmark{std::move(problem), Simplex{d}, std::move(x0)};
}

}  // namespace pmvr
