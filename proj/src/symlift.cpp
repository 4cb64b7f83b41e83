#include "mswlab/symlift.hpp"

#include <cmath>

#include "mswlab/error.hpp"

namespace mswlab {

namespace {
constexpr double kSupportMatchTol = 1e-9;
}

CertifiedValue lifted_w11(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol, Execution exec) {
  if (mu.dim() != nu.dim()) throw ValidationError("measures live in different dimensions");
  if (!(tol > 0.0)) throw ValidationError("tol must be positive");
  const auto d = static_cast<int>(mu.dim());
  if (d > 3) throw UnsupportedError("certified lifted solver requires dimension <= 3 (got " + std::to_string(d) + ")");
  return max_sliced_grid(mu, nu, 1.0, tol, exec, SliceKind::squared);
}

CertifiedValue lifted_w11_pga(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PgaOptions& options) {
  return max_sliced_pga(mu, nu, 1.0, options, SliceKind::squared);
}

double w21_dirac_identity(const DiscreteMeasure& mu) {
  return std::sqrt(covariance_summary(mu).op_norm);
}

double witness_covariance(const PointMatrix& samples, double sigma_op) {
  if (samples.cols() == 0) throw ValidationError("witness needs at least one sample");
  if (!(sigma_op >= 0.0)) throw ValidationError("sigma_op must be nonnegative");
  const Matrix sample_moment = samples * samples.transpose() / static_cast<double>(samples.cols());
  return std::max(0.0, std::sqrt(symmetric_op_norm(sample_moment)) - std::sqrt(sigma_op));
}

double witness_binomial(const PointMatrix& samples, const DiagonalConstruction& construction) {
  if (samples.cols() == 0) throw ValidationError("witness needs at least one sample");
  const auto& support = construction.measure;
  if (samples.rows() != support.dim()) throw ValidationError("samples and construction dimensions differ");

  const Vector top = std::sqrt(construction.trace) * construction.top_direction;
  std::size_t on_top = 0;
  for (Eigen::Index i = 0; i < samples.cols(); ++i) {
    const auto x = samples.col(i);
    bool on_support = false;
    for (std::size_t k = 0; k < support.size() && !on_support; ++k) {
      on_support = (x - support.point(k)).lpNorm<Eigen::Infinity>() <= kSupportMatchTol;
    }
    if (!on_support) {
      throw ValidationError("sample " + std::to_string(i) + " is not on the construction's support");
    }
    if ((x - top).lpNorm<Eigen::Infinity>() <= kSupportMatchTol ||
        (x + top).lpNorm<Eigen::Infinity>() <= kSupportMatchTol) {
      ++on_top;
    }
  }
  const double freq = static_cast<double>(on_top) / static_cast<double>(samples.cols());
  return std::sqrt(construction.trace) * std::sqrt(std::abs(freq - construction.top_ratio));
}

}  // namespace mswlab
