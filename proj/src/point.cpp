#include "pmvr/point.hpp"

#include <cmath>
#include <sstream>

#include "pmvr/error.hpp"

namespace pmvr {

std::string Shape::str() const {
  std::ostringstream os;
  if (is_matrix)
    os << "matrix(" << rows << "x" << cols << ")";
  else
    os << "vector(" << rows << ")";
  return os.str();
}

Point::Point(Shape shape, double fill) : shape_(shape), data_(shape.size(), fill) {
  check_finite("Point");
}

Point::Point(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size())
    throw ShapeError("Point: " + std::to_string(data_.size()) + " entries for shape " +
                     shape_.str());
  check_finite("Point");
}

Point Point::vector(std::initializer_list<double> values) {
  return vector(std::vector<double>(values));
}

Point Point::vector(std::vector<double> values) {
  const auto d = values.size();
  return Point(Shape::vector(d), std::move(values));
}

Point Point::matrix(std::size_t m, std::size_t n, std::vector<double> values) {
  return Point(Shape::matrix(m, n), std::move(values));
}

Point Point::identity(std::size_t m, std::size_t n) {
  Point p(Shape::matrix(m, n));
  for (std::size_t i = 0; i < std::min(m, n); ++i) p(i, i) = 1.0;
  return p;
}

Point Point::reshaped(Shape shape) const {
  if (shape.size() != size())
    throw ShapeError("reshape: cannot view " + shape_.str() + " as " + shape.str());
  Point out = *this;
  out.shape_ = shape;
  return out;
}

void Point::check_finite(const char* context) const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw NumericError(std::string(context) + ": non-finite entry");
  }
}

void require_same_shape(const Point& x, const Point& y, const char* context) {
  if (x.shape() != y.shape())
    throw ShapeError(std::string(context) + ": shape mismatch " + x.shape().str() + " vs " +
                     y.shape().str());
}

Point axpy(double a, const Point& x, const Point& y) {
  require_same_shape(x, y, "axpy");
  Point out = y;
  auto o = out.mutable_data();
  auto xs = x.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * xs[i];
  out.check_finite("axpy");
  return out;
}

Point lincomb(double a, const Point& x, double b, const Point& y) {
  require_same_shape(x, y, "lincomb");
  Point out(x.shape());
  auto o = out.mutable_data();
  auto xs = x.data();
  auto ys = y.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = a * xs[i] + b * ys[i];
  out.check_finite("lincomb");
  return out;
}

Point operator+(const Point& x, const Point& y) { return axpy(1.0, x, y); }

Point operator-(const Point& x, const Point& y) { return axpy(-1.0, y, x); }

Point operator*(double a, const Point& x) {
  Point out = x;
  for (double& v : out.mutable_data()) v *= a;
  out.check_finite("scale");
  return out;
}

double inner(const Point& x, const Point& y) {
  require_same_shape(x, y, "inner");
  double s = 0.0;
  auto xs = x.data();
  auto ys = y.data();
  for (std::size_t i = 0; i < xs.size(); ++i) s += xs[i] * ys[i];
  return s;
}

double squared_norm(const Point& x) {
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  return s;
}

double norm(const Point& x) { return std::sqrt(squared_norm(x)); }

Point transpose(const Point& m) {
  if (!m.shape().is_matrix) throw ShapeError("transpose: expected a matrix, got " + m.shape().str());
  Point out(Shape::matrix(m.cols(), m.rows()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

Point matmul(const Point& a, const Point& b) {
  if (!a.shape().is_matrix || !b.shape().is_matrix)
    throw ShapeError("matmul: operands must be matrices");
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions " + a.shape().str() + " * " + b.shape().str());
  Point out(Shape::matrix(a.rows(), b.cols()));
  const std::size_t n = b.cols();
  auto o = out.mutable_data();
  auto bs = b.data();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = bs.data() + k * n;
      double* orow = o.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  out.check_finite("matmul");
  return out;
}

Point matmul_chain(std::span<const Point> factors) {
  if (factors.empty()) throw InvalidArgument("matmul_chain: empty factor list");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!factors[i].shape().is_matrix)
      throw ShapeError("matmul_chain: factor " + std::to_string(i + 1) + " is not a matrix");
    if (i > 0 && factors[i - 1].cols() != factors[i].rows())
      throw ShapeError("matmul_chain: dimension mismatch at position " + std::to_string(i + 1) +
                       " (" + factors[i - 1].shape().str() + " * " + factors[i].shape().str() +
                       ")");
  }
  Point acc = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) acc = matmul(acc, factors[i]);
  return acc;
}

}  // namespace pmvr
