#include "pmvr/feasible_set.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmvr/error.hpp"
#include "pmvr/random.hpp"

namespace pmvr {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const Point& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

void require_shape(const FeasibleSet& set, const Point& p, const char* op) {
  const Shape s = ambient_shape(set);
  if (p.shape() != s)
    throw ShapeError(std::string(op) + ": expected " + s.str() + ", got " + p.shape().str());
}

Point simplex_lmo(const Point& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i] < d[best]) best = i;  // strict: ties keep the lowest index
  Point z(d.shape());
  z[best] = 1.0;
  return z;
}

double threshold_for_simplex(std::vector<double> sorted_desc, double radius) {
  std::sort(sorted_desc.begin(), sorted_desc.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted_desc.size(); ++j) {
    cumulative += sorted_desc[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (sorted_desc[j] - candidate > 0.0) theta = candidate;
  }
  return theta;
}

}  // namespace

Box make_box(Point lower, Point upper) {
  require_same_shape(lower, upper, "Box");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw InvalidArgument("Box: lower bound exceeds upper bound");
  return Box{std::move(lower), std::move(upper)};
}

Shape ambient_shape(const FeasibleSet& set) {
  return std::visit(Overloaded{
                        [](const Simplex& s) { return Shape::vector(s.dim); },
                        [](const NuclearNormBall& b) { return Shape::matrix(b.rows, b.cols); },
                        [](const Box& b) { return b.lower.shape(); },
                    },
                    set);
}

double diameter(const FeasibleSet& set) {
  return std::visit(Overloaded{
                        [](const Simplex& s) { return s.dim >= 2 ? std::sqrt(2.0) : 0.0; },
                        [](const NuclearNormBall& b) { return 2.0 * b.radius; },
                        [](const Box& b) { return norm(b.upper - b.lower); },
                    },
                    set);
}

std::string describe(const FeasibleSet& set) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Simplex& s) { os << "simplex(" << s.dim << ")"; },
                 [&](const NuclearNormBall& b) {
                   os << "nuclear(" << b.rows << "x" << b.cols << ", s=" << b.radius << ")";
                 },
                 [&](const Box& b) { os << "box(" << b.lower.shape().str() << ")"; },
             },
             set);
  return os.str();
}

Point project_simplex(const Point& y, double radius) {
  const double theta =
      threshold_for_simplex(std::vector<double>(y.data().begin(), y.data().end()), radius);
  Point x = y;
  for (double& v : x.mutable_data()) v = std::max(v - theta, 0.0);
  return x;
}

SingularPair top_singular_pair(const Point& matrix, const Point& start, double tol, int max_iter) {
  if (!matrix.shape().is_matrix) throw ShapeError("top_singular_pair: expected a matrix");
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();
  if (start.size() != n) throw ShapeError("top_singular_pair: start vector has wrong length");
  if (squared_norm(matrix) == 0.0) throw InvalidArgument("top_singular_pair: zero matrix");

  const double* a = matrix.data().data();
  std::vector<double> v(start.data().begin(), start.data().end());
  std::vector<double> u(m), z(n);
  double best_residual = std::numeric_limits<double>::infinity();

  double vn = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (vn == 0.0) throw InvalidArgument("top_singular_pair: zero start vector");
  for (double& e : v) e /= vn;

  std::size_t restart = 0;
  for (int it = 1; it <= max_iter; ++it) {
    // u = M v / ||M v||, so M v = sigma u holds exactly.
    double sigma2 = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double* row = a + r * n;
      double s = 0.0;
      for (std::size_t c = 0; c < n; ++c) s += row[c] * v[c];
      u[r] = s;
      sigma2 += s * s;
    }
    const double sigma = std::sqrt(sigma2);
    if (sigma == 0.0) {
      // v fell in the null space; restart on the next basis vector.
      std::fill(v.begin(), v.end(), 0.0);
      v[restart++ % n] = 1.0;
      continue;
    }
    for (double& e : u) e /= sigma;

    std::fill(z.begin(), z.end(), 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double* row = a + r * n;
      const double ur = u[r];
      for (std::size_t c = 0; c < n; ++c) z[c] += row[c] * ur;
    }
    double res2 = 0.0, zn2 = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      const double diff = z[c] - sigma * v[c];
      res2 += diff * diff;
      zn2 += z[c] * z[c];
    }
    const double residual = std::sqrt(res2) / sigma;
    best_residual = std::min(best_residual, residual);
    if (residual <= tol) {
      return SingularPair{sigma, Point(Shape::vector(m), u), Point(Shape::vector(n), v), it};
    }
    const double zn = std::sqrt(zn2);
    for (std::size_t c = 0; c < n; ++c) v[c] = z[c] / zn;
  }
  throw ConvergenceError("top_singular_pair: no convergence after " + std::to_string(max_iter) +
                             " iterations (best relative residual " +
                             std::to_string(best_residual) + ")",
                         best_residual);
}

SingularPair top_singular_pair(const Point& matrix, double tol, int max_iter, std::uint64_t seed) {
  RandomSource rng(seed, stream_index(StreamPurpose::kPowerIteration, 0, 0));
  Point start = gaussian_sample(rng, 0.0, 1.0, Shape::vector(matrix.cols()));
  return top_singular_pair(matrix, start, tol, max_iter);
}

std::vector<double> singular_values(const Point& matrix) {
  if (!matrix.shape().is_matrix) throw ShapeError("singular_values: expected a matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(matrix));
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

double nuclear_norm(const Point& matrix) {
  const auto s = singular_values(matrix);
  return std::accumulate(s.begin(), s.end(), 0.0);
}

Point lmo(const FeasibleSet& set, const Point& direction) {
  require_shape(set, direction, "lmo");
  return std::visit(
      Overloaded{
          [&](const Simplex&) { return simplex_lmo(direction); },
          [&](const NuclearNormBall& b) {
            if (squared_norm(direction) == 0.0) return Point(direction.shape());
            Point out(direction.shape());
            try {
              const auto pair = top_singular_pair(direction, b.power_tol, b.power_max_iter,
                                                  b.start_seed);
              for (std::size_t r = 0; r < b.rows; ++r)
                for (std::size_t c = 0; c < b.cols; ++c) out(r, c) = -b.radius * pair.u[r] * pair.v[c];
            } catch (const ConvergenceError&) {
              // Narrow spectral gap: take the leading pair from a full SVD instead.
              Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(direction),
                                                    Eigen::ComputeThinU | Eigen::ComputeThinV);
              for (std::size_t r = 0; r < b.rows; ++r)
                for (std::size_t c = 0; c < b.cols; ++c)
                  out(r, c) = -b.radius * svd.matrixU()(r, 0) * svd.matrixV()(c, 0);
            }
            return out;
          },
          [&](const Box& b) {
            Point out = b.lower;
            for (std::size_t i = 0; i < out.size(); ++i)
              if (direction[i] < 0.0) out[i] = b.upper[i];
            return out;
          },
      },
      set);
}

Point project(const FeasibleSet& set, const Point& point) {
  require_shape(set, point, "project");
  return std::visit(
      Overloaded{
          [&](const Simplex&) { return project_simplex(point, 1.0); },
          [&](const NuclearNormBall& b) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(point),
                                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
            const Eigen::VectorXd s = svd.singularValues();
            if (s.sum() <= b.radius) return point;
            const Point projected_s =
                project_simplex(Point::vector(std::vector<double>(s.data(), s.data() + s.size())),
                                b.radius);
            Eigen::VectorXd t(s.size());
            for (Eigen::Index i = 0; i < s.size(); ++i) t[i] = projected_s[i];
            const RowMajor x = svd.matrixU() * t.asDiagonal() * svd.matrixV().transpose();
            return Point::matrix(b.rows, b.cols, std::vector<double>(x.data(), x.data() + x.size()));
          },
          [&](const Box& b) {
            Point out = point;
            for (std::size_t i = 0; i < out.size(); ++i)
              out[i] = std::clamp(out[i], b.lower[i], b.upper[i]);
            return out;
          },
      },
      set);
}

bool contains(const FeasibleSet& set, const Point& point, double tol) {
  if (point.shape() != ambient_shape(set)) return false;
  return std::visit(Overloaded{
                        [&](const Simplex&) {
                          double sum = 0.0;
                          for (double v : point.data()) {
                            if (v < -tol) return false;
                            sum += v;
                          }
                          return std::abs(sum - 1.0) <= tol;
                        },
                        [&](const NuclearNormBall& b) { return nuclear_norm(point) <= b.radius + tol; },
                        [&](const Box& b) {
                          for (std::size_t i = 0; i < point.size(); ++i)
                            if (point[i] < b.lower[i] - tol || point[i] > b.upper[i] + tol) return false;
                          return true;
                        },
                    },
                    set);
}

}  // namespace pmvr
