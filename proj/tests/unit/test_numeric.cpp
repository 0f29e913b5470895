#include <gtest/gtest.h>

#include <set>

#include "pmvr/error.hpp"
#include "pmvr/point.hpp"
#include "pmvr/random.hpp"

namespace pmvr {
namespace {

TEST(Point, AxpyCases) {
  EXPECT_EQ(axpy(0.0, Point::vector({7, -3}), Point::vector({1, 2})), Point::vector({1, 2}));
  EXPECT_EQ(axpy(1.0, Point::vector({1, 1}), Point::vector({1, 2})), Point::vector({2, 3}));
  EXPECT_EQ(axpy(-0.5, Point::vector({2, 4}), Point::vector({1, 2})), Point::vector({0, 0}));
}

TEST(Point, InnerCases) {
  EXPECT_EQ(inner(Point::vector({1, 0}), Point::vector({0, 1})), 0.0);
  EXPECT_EQ(inner(Point::vector({1, 2}), Point::vector({3, 4})), 11.0);
  EXPECT_EQ(inner(Point::identity(2, 2), Point::matrix(2, 2, {3, 0, 0, 1})), 4.0);
}

TEST(Point, ShapeMismatchThrows) {
  EXPECT_THROW(axpy(1.0, Point::vector({1, 2}), Point::vector({1, 2, 3})), ShapeError);
  EXPECT_THROW(inner(Point::vector({1, 2}), Point::matrix(1, 2, {1, 2})), ShapeError);
  EXPECT_THROW(matmul(Point::matrix(2, 3, std::vector<double>(6)), Point::matrix(2, 1, {1, 1})),
               ShapeError);
}

TEST(Point, NonFiniteResultThrows) {
  const Point big = Point::vector({1e308});
  EXPECT_THROW(axpy(10.0, big, big), NumericError);
}

TEST(Point, MatmulChainCases) {
  const Point i3 = Point::identity(3, 3);
  EXPECT_EQ(matmul_chain(std::vector<Point>{i3}), i3);
  const std::vector<Point> diag{Point::matrix(2, 2, {2, 0, 0, 2}), Point::matrix(2, 2, {3, 0, 0, 3})};
  EXPECT_EQ(matmul_chain(diag), Point::matrix(2, 2, {6, 0, 0, 6}));
}

TEST(Point, MatmulMatchesTripleLoop) {
  RandomSource rng(11, stream_index(StreamPurpose::kTest, 1, 0));
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t m = 1 + rng.uniform_index(5), k = 1 + rng.uniform_index(5),
                      n = 1 + rng.uniform_index(5);
    const Point a = gaussian_sample(rng, 0.0, 1.0, Shape::matrix(m, k));
    const Point b = gaussian_sample(rng, 0.0, 1.0, Shape::matrix(k, n));
    const Point c = matmul_chain(std::vector<Point>{a, b});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < k; ++l) s += a(i, l) * b(l, j);
        EXPECT_NEAR(c(i, j), s, 1e-14);
      }
  }
}

TEST(Point, TransposeInvolution) {
  const Point a = Point::matrix(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(transpose(transpose(a)), a);
  EXPECT_EQ(transpose(a)(2, 1), 6.0);
}

TEST(Philox, KnownAnswerZeroCounterZeroKey) {
  const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto out = philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                 {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(Random, StreamIndexLayout) {
  EXPECT_EQ(stream_index(StreamPurpose::kSamples, 0, 0), 0u);
  EXPECT_EQ(stream_index(StreamPurpose::kSamples, 1, 5), (1ull << 40) | 5u);
  EXPECT_EQ(stream_index(StreamPurpose::kTau, 0, 0), 1ull << 56);
  EXPECT_THROW(stream_index(StreamPurpose::kSamples, 0, 1ull << 40), InvalidArgument);
}

TEST(Random, SameSeedSameStreamIdentical) {
  RandomSource a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    EXPECT_EQ(x, y);
    differs |= x != z;
  }
  EXPECT_TRUE(differs);
}

TEST(Random, UniformAndIndexRanges) {
  RandomSource rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.uniform_index(7), 7u);
  }
  EXPECT_EQ(rng.uniform_index(1), 0u);
  EXPECT_THROW(rng.uniform_index(0), InvalidArgument);
}

TEST(Random, UniformIndexCoversAllValues) {
  RandomSource rng(5);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) seen.insert(rng.uniform_index(10));
  EXPECT_EQ(seen.size(), 10u);
}

TEST(GaussianSample, ZeroVarianceIsConstant) {
  RandomSource rng(1);
  const Point p = gaussian_sample(rng, 2.5, 0.0, Shape::vector(4));
  EXPECT_EQ(p, Point::vector({2.5, 2.5, 2.5, 2.5}));
}

TEST(GaussianSample, Deterministic) {
  RandomSource a(7), b(7);
  EXPECT_EQ(gaussian_sample(a, 0.0, 1.0, Shape::matrix(3, 3)),
            gaussian_sample(b, 0.0, 1.0, Shape::matrix(3, 3)));
}

TEST(GaussianSample, SampleVarianceNearTarget) {
  RandomSource rng(2024);
  const Point p = gaussian_sample(rng, 0.0, 0.3, Shape::vector(100000));
  double mean = 0.0;
  for (double v : p.data()) mean += v;
  mean /= static_cast<double>(p.size());
  double var = 0.0;
  for (double v : p.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(p.size() - 1);
  EXPECT_GE(var, 0.27);
  EXPECT_LE(var, 0.33);
  EXPECT_NEAR(mean, 0.0, 0.01);
}

TEST(GaussianSample, NegativeVarianceThrows) {
  RandomSource rng(1);
  EXPECT_THROW(gaussian_sample(rng, 0.0, -1.0, Shape::vector(2)), InvalidArgument);
}

}  // namespace
}  // namespace pmvr
