#include <gtest/gtest.h>

#include <sstream>

#include "mswlab/error.hpp"
#include "mswlab/measures.hpp"

using namespace mswlab;

namespace {
DiscreteMeasure parse(const std::string& text, bool weights = false) {
  std::istringstream in(text);
  return parse_csv(in, weights);
}
}  // namespace

TEST(Csv, UniformByDefault) {
  const auto mu = parse("0,0\n1,0\n0,1\n");
  EXPECT_EQ(mu.dim(), 2);
  ASSERT_EQ(mu.size(), 3u);
  for (double w : mu.weights()) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(Csv, SingleAtom) {
  const auto mu = parse("5\n");
  EXPECT_EQ(mu.dim(), 1);
  EXPECT_EQ(mu.size(), 1u);
  EXPECT_DOUBLE_EQ(mu.point(0)[0], 5.0);
  EXPECT_DOUBLE_EQ(mu.weight(0), 1.0);
}

TEST(Csv, WeightsAreNormalised) {
  const auto mu = parse("# comment\n0,2\n\n1,1\n2,1\n", true);
  EXPECT_EQ(mu.dim(), 1);
  EXPECT_DOUBLE_EQ(mu.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(mu.weight(1), 0.25);
  EXPECT_DOUBLE_EQ(mu.weight(2), 0.25);
}

TEST(Csv, Errors) {
  EXPECT_THROW(parse(""), ValidationError);
  EXPECT_THROW(parse("1,2\n3\n"), ParseError);
  EXPECT_THROW(parse("1,x\n"), ParseError);
  EXPECT_THROW(parse("1,2,\n"), ParseError);
  EXPECT_THROW(parse("1,-1\n", true), ValidationError);
  EXPECT_THROW(from_csv("/nonexistent/file.csv", false), IoError);
}

TEST(Csv, RoundTrip) {
  const auto mu = parse("0.1,0.2,1\n-3,4e-7,3\n", true);
  std::ostringstream out;
  write_csv(out, mu, true);
  const auto back = parse(out.str(), true);
  EXPECT_EQ(back.points(), mu.points());
  EXPECT_EQ(back.weights(), mu.weights());
}

TEST(Measure, RejectsBadWeights) {
  PointMatrix pts(1, 2);
  pts << 0, 1;
  EXPECT_THROW(DiscreteMeasure(pts, {0.5, 0.6}), ValidationError);
  EXPECT_THROW(DiscreteMeasure(pts, {1.5, -0.5}), ValidationError);
  EXPECT_THROW(DiscreteMeasure(pts, {1.0}), ValidationError);
}

TEST(TwoPoint, Atoms) {
  const auto mu = two_point(Vector::Unit(2, 0));
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.point(0), Vector::Unit(2, 0));
  EXPECT_EQ(mu.point(1), -Vector::Unit(2, 0));
  EXPECT_DOUBLE_EQ(mu.weight(0), 0.5);
  Vector y(2);
  y << 3, 4;
  EXPECT_TRUE(two_point(y).second_moment().isApprox(y * y.transpose()));
  EXPECT_TRUE(two_point(y).is_symmetric());
  EXPECT_THROW(two_point(Vector::Zero(2)), ValidationError);
}

TEST(TwoPoint, SymmetrizingIsIdentity) {
  const auto mu = two_point(Vector::Unit(2, 0));
  const auto s = merge_duplicates(symmetrize_empirical(mu.points()));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(s.weight(1), 0.5);
}

TEST(ScaledBasis, Construction) {
  const auto mu = scaled_basis(4);
  EXPECT_EQ(mu.size(), 8u);
  EXPECT_TRUE(mu.second_moment().isApprox(Matrix::Identity(4, 4)));
  for (std::size_t i = 0; i < mu.size(); ++i) EXPECT_DOUBLE_EQ(mu.point(i).norm(), 2.0);
  const auto one = scaled_basis(1);
  EXPECT_EQ(one.size(), 2u);
  EXPECT_DOUBLE_EQ(std::abs(one.point(0)[0]), 1.0);
}

TEST(Diagonal, HalfIdentity) {
  const auto c = diagonal_construction(Matrix::Identity(2, 2) / 2);
  ASSERT_EQ(c.measure.size(), 4u);
  for (double w : c.measure.weights()) EXPECT_DOUBLE_EQ(w, 0.25);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(c.measure.point(i).norm(), 1.0);
  EXPECT_DOUBLE_EQ(c.top_ratio, 0.5);
  EXPECT_DOUBLE_EQ(c.trace, 1.0);
  EXPECT_EQ(c.top_direction, Vector::Unit(2, 0));
}

TEST(Diagonal, SecondMomentByDirectSummation) {
  const auto c = diagonal_construction(Matrix::Identity(2, 2) * 2);
  Matrix s = Matrix::Zero(2, 2);
  for (std::size_t i = 0; i < c.measure.size(); ++i) {
    s += c.measure.weight(i) * c.measure.point(i) * c.measure.point(i).transpose();
    EXPECT_DOUBLE_EQ(c.measure.point(i).squaredNorm(), 4.0);
  }
  EXPECT_TRUE(s.isApprox(Matrix::Identity(2, 2) * 2, 1e-14));
}

TEST(Diagonal, NonDiagonalSigma) {
  Matrix sigma(3, 3);
  sigma << 2, 0.5, 0, 0.5, 2, 0.3, 0, 0.3, 1.5;
  const auto c = diagonal_construction(sigma);
  EXPECT_TRUE(c.measure.second_moment().isApprox(sigma, 1e-12));
  EXPECT_TRUE(c.measure.is_symmetric());
}

TEST(Diagonal, Rejections) {
  Matrix bad(2, 2);
  bad << 0.9, 0, 0, 0.1;
  EXPECT_THROW(diagonal_construction(bad), ValidationError);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -1;
  EXPECT_THROW(diagonal_construction(neg), ValidationError);
}

TEST(Sample, Preconditions) {
  EXPECT_THROW(sample(scaled_basis(2), 0, 1), ValidationError);
  Vector x(3);
  x << 1, 2, 3;
  const auto s = sample(DiscreteMeasure::dirac(x), 5, 1);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_EQ(s.col(i), x);
}

TEST(Sample, FrequenciesMatchWeights) {
  PointMatrix pts(1, 3);
  pts << 0, 1, 2;
  const DiscreteMeasure mu(pts, {0.2, 0.3, 0.5});
  const std::size_t n = 100000;
  const auto s = sample(mu, n, 12345);
  std::array<double, 3> count{};
  for (Eigen::Index i = 0; i < s.cols(); ++i) count[static_cast<std::size_t>(s(0, i))] += 1;
  for (std::size_t k = 0; k < 3; ++k) {
    const double w = mu.weight(k);
    EXPECT_NEAR(count[k] / n, w, 4 * std::sqrt(w * (1 - w) / n));
  }
}

TEST(Sample, Deterministic) {
  EXPECT_EQ(sample(scaled_basis(3), 50, 9), sample(scaled_basis(3), 50, 9));
  EXPECT_NE(sample(scaled_basis(3), 50, 9), sample(scaled_basis(3), 50, 10));
}

TEST(Symmetrize, Properties) {
  PointMatrix x(2, 1);
  x << 1, 0;
  const auto s = symmetrize_empirical(x);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.point(1), -s.point(0));

  const auto xs = sample(diagonal_construction(Matrix::Identity(3, 3) / 3).measure, 17, 4);
  const auto sym = symmetrize_empirical(xs);
  EXPECT_LT(sym.mean().norm(), 1e-15);
  EXPECT_TRUE(sym.second_moment().isApprox(xs * xs.transpose() / 17, 1e-14));
  EXPECT_TRUE(sym.is_symmetric());
}

TEST(Covariance, Examples) {
  const auto sb = covariance_summary(scaled_basis(4));
  EXPECT_TRUE(sb.sigma.isApprox(Matrix::Identity(4, 4)));
  EXPECT_NEAR(sb.op_norm, 1.0, 1e-14);
  EXPECT_NEAR(sb.trace, 4.0, 1e-14);
  EXPECT_NEAR(sb.radius, 2.0, 1e-14);

  const auto zero = covariance_summary(DiscreteMeasure::dirac(Vector::Zero(3)));
  EXPECT_EQ(zero.op_norm, 0.0);

  Vector y(2);
  y << 3, 4;
  const auto tp = covariance_summary(two_point(y));
  EXPECT_NEAR(tp.op_norm, 25.0, 1e-12);
  EXPECT_NEAR(tp.trace, 25.0, 1e-12);
  EXPECT_NEAR(tp.radius, 5.0, 1e-14);
}

TEST(MergeDuplicates, CombinesMass) {
  PointMatrix pts(2, 5);
  pts << 1, 0, 1, 2, 0, 0, 1, 0, 2, 1;
  const auto mu = DiscreteMeasure::uniform(pts);
  const auto m = merge_duplicates(mu);
  ASSERT_EQ(m.size(), 3u);
  EXPECT_TRUE(m.second_moment().isApprox(mu.second_moment(), 1e-15));
  EXPECT_TRUE(m.mean().isApprox(mu.mean(), 1e-15));
  double total = 0;
  for (double w : m.weights()) total += w;
  EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST(Transform, ScaledAndTransformed) {
  const auto mu = scaled_basis(2);
  EXPECT_NEAR(mu.scaled(3.0).radius(), 3.0 * std::sqrt(2.0), 1e-14);
  Matrix a(1, 2);
  a << 1, 1;
  EXPECT_EQ(mu.transformed(a).dim(), 1);
}
