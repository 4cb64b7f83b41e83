#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mswlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Samples are stored column-wise: column i is the i-th draw.
using PointMatrix = Eigen::MatrixXd;

/// Finite probability measure on R^d. Points are columns of a d x n matrix.
/// Atoms are kept as given; duplicates are never merged.
class DiscreteMeasure {
 public:
  /// Weights must be nonnegative and already sum to 1 within 1e-12.
  DiscreteMeasure(PointMatrix points, std::vector<double> weights);

  /// Divides raw nonnegative weights by their sum.
  static DiscreteMeasure normalized(PointMatrix points, std::vector<double> raw_weights);
  static DiscreteMeasure uniform(PointMatrix points);
  static DiscreteMeasure dirac(const Vector& x);

  Eigen::Index dim() const { return points_.rows(); }
  std::size_t size() const { return weights_.size(); }

  const PointMatrix& points() const { return points_; }
  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// max_i ||x_i||_2
  double radius() const;
  Vector mean() const;
  /// sum_i w_i x_i x_i^T
  Matrix second_moment() const;
  /// Mass at x equals mass at -x for every atom x, up to `tol` in both
  /// position and mass.
  bool is_symmetric(double tol = 1e-9) const;

  /// Image under x -> A x (A may change the dimension).
  DiscreteMeasure transformed(const Matrix& a) const;
  DiscreteMeasure scaled(double factor) const;

 private:
  PointMatrix points_;
  std::vector<double> weights_;
};

struct CovarianceSummary {
  Matrix sigma;
  double op_norm = 0.0;
  double trace = 0.0;
  double radius = 0.0;
};

/// Output of diagonal_construction: the measure plus what the binomial
/// witness needs to recognise its top-eigenvector atoms.
struct DiagonalConstruction {
  DiscreteMeasure measure;
  Vector top_direction;   // unit u_1
  double top_ratio = 0.0; // lambda_1 / Tr(Sigma)
  double trace = 0.0;     // Tr(Sigma)
  Matrix sigma;
};

/// Parses the point-cloud CSV format: comma-separated decimals, one point per
/// row, optional trailing weight column, '#' comment lines and blank lines
/// skipped. `source` names the input in error messages.
DiscreteMeasure parse_csv(std::istream& in, bool has_weights, const std::string& source = "<stream>");
DiscreteMeasure from_csv(const std::filesystem::path& path, bool has_weights);
void write_csv(std::ostream& out, const DiscreteMeasure& mu, bool with_weights);

/// Uniform on {y0, -y0}.
DiscreteMeasure two_point(const Vector& y0);

/// Uniform on the 2d points +-sqrt(d) e_j; second moment is the identity.
DiscreteMeasure scaled_basis(int d);

/// Symmetric measure with second moment `sigma`, supported on the sphere of
/// squared radius Tr(sigma): atoms +-sqrt(t) u_j with mass lambda_j / (2t).
/// Requires sigma PSD with ||sigma||_op <= Tr(sigma) / 2.
DiagonalConstruction diagonal_construction(const Matrix& sigma);

/// n i.i.d. draws by inverse CDF over the atoms. Pure function of its inputs.
PointMatrix sample(const DiscreteMeasure& mu, std::size_t n, std::uint64_t seed);

/// (1/n) sum delta_{X_i}
DiscreteMeasure empirical(const PointMatrix& samples);

/// (1/2n) sum (delta_{X_i} + delta_{-X_i})
DiscreteMeasure symmetrize_empirical(const PointMatrix& samples);

/// Same measure with exactly equal atoms combined (atoms then in
/// lexicographic order). Returned unchanged when there are no duplicates.
DiscreteMeasure merge_duplicates(const DiscreteMeasure& mu);

CovarianceSummary covariance_summary(const DiscreteMeasure& mu);

/// Largest |eigenvalue| of a symmetric matrix.
double symmetric_op_norm(const Matrix& m);

}  // namespace mswlab
