#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pmvr {

/// Shape of a Point: a d-vector or an m x n row-major matrix.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 1;
  bool is_matrix = false;

  static Shape vector(std::size_t d) { return {d, 1, false}; }
  static Shape matrix(std::size_t m, std::size_t n) { return {m, n, true}; }

  std::size_t size() const noexcept { return rows * cols; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense real array with an immutable shape. Every public arithmetic operation
/// rejects non-finite results, so a Point holds finite entries only.
class Point {
 public:
  Point() = default;
  explicit Point(Shape shape, double fill = 0.0);
  Point(Shape shape, std::vector<double> data);

  static Point vector(std::initializer_list<double> values);
  static Point vector(std::vector<double> values);
  static Point matrix(std::size_t m, std::size_t n, std::vector<double> values);
  /// Rectangular identity: ones on the main diagonal.
  static Point identity(std::size_t m, std::size_t n);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t rows() const noexcept { return shape_.rows; }
  std::size_t cols() const noexcept { return shape_.cols; }

  std::span<const double> data() const noexcept { return data_; }
  /// Raw entry access for numeric kernels; the shape stays fixed.
  std::span<double> mutable_data() noexcept { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }

  /// Same entries viewed under another shape of equal size.
  Point reshaped(Shape shape) const;

  /// Throws NumericError if any entry is NaN or infinite.
  void check_finite(const char* context) const;

  friend bool operator==(const Point&, const Point&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

/// a*x + y.
Point axpy(double a, const Point& x, const Point& y);
/// a*x + b*y.
Point lincomb(double a, const Point& x, double b, const Point& y);
Point operator+(const Point& x, const Point& y);
Point operator-(const Point& x, const Point& y);
Point operator*(double a, const Point& x);

/// Euclidean (Frobenius for matrices) inner product.
double inner(const Point& x, const Point& y);
double squared_norm(const Point& x);
double norm(const Point& x);

Point transpose(const Point& m);
/// Matrix product of two matrix-shaped points.
Point matmul(const Point& a, const Point& b);
/// Left-to-right product J1 * J2 * ... * JK of matrix-shaped points.
Point matmul_chain(std::span<const Point> factors);

/// Throws ShapeError naming `context` when the shapes differ.
void require_same_shape(const Point& x, const Point& y, const char* context);

}  // namespace pmvr
