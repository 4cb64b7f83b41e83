#pragma once

#include "mswlab/measures.hpp"
#include "mswlab/sliced.hpp"

namespace mswlab {

/// The pushforward of a measure by x -> x x^T into (R^{d x d}, ||.||_op).
/// Atoms are never materialised: every functional in the dual unit ball is
/// a convex combination of +-v v^T, and v v^T acts on x x^T as <x, v>^2, so
/// all lifted computations reduce to quadratic forms of the base atoms.
class LiftedMeasure {
 public:
  explicit LiftedMeasure(DiscreteMeasure base) : base_(std::move(base)) {}
  const DiscreteMeasure& base() const { return base_; }
  /// sum_i w_i x_i x_i^T, the mean of the lifted measure.
  Matrix mean() const { return base_.second_moment(); }

 private:
  DiscreteMeasure base_;
};

/// Max-sliced W_1 between lifted measures: sup over unit v of W_1 between
/// the pushforwards x -> <x, v>^2. Certified branch-and-bound for d <= 3
/// with direction-Lipschitz modulus 2 (R_mu^2 + R_nu^2).
CertifiedValue lifted_w11(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol,
                          Execution exec = Execution::parallel);

/// Same objective by projected gradient ascent, any dimension.
CertifiedValue lifted_w11_pga(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const PgaOptions& options);

/// W_{2,1}(mu, delta_0) = ||Sigma||_op^{1/2}.
double w21_dirac_identity(const DiscreteMeasure& mu);

/// max(0, ||(1/n) sum X_i X_i^T||_op^{1/2} - sigma_op^{1/2}); a lower bound
/// on W_{2,1}(mu, symmetrized empirical) when sigma_op = ||Sigma(mu)||_op.
double witness_covariance(const PointMatrix& samples, double sigma_op);

/// sqrt(Tr) * |Y/n - lambda_1/Tr|^{1/2}, where Y counts samples on +-sqrt(Tr) u_1:
/// W_2 between the u_1-pushforwards of the construction and of the
/// symmetrized empirical measure. Samples must lie on the construction's
/// support (matched within 1e-9).
double witness_binomial(const PointMatrix& samples, const DiagonalConstruction& construction);

}  // namespace mswlab
