#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mswlab/execution.hpp"
#include "mswlab/measures.hpp"
#include "mswlab/ot1d.hpp"

namespace mswlab {

/// Unit vector in R^d.
class Direction {
 public:
  /// `v` must already have norm 1 within 1e-12.
  explicit Direction(Vector v);
  static Direction normalized(const Vector& v);

  const Vector& vector() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }

 private:
  Vector v_;
};

/// s functionals v_1..v_s in the closed unit ball of R^d; not required to
/// be orthonormal.
class Frame {
 public:
  explicit Frame(std::vector<Vector> vs);
  explicit Frame(const Direction& v) : Frame(std::vector<Vector>{v.vector()}) {}

  std::size_t size() const { return vs_.size(); }
  Eigen::Index dim() const { return vs_.front().size(); }
  const std::vector<Vector>& vectors() const { return vs_; }
  const Vector& operator[](std::size_t k) const { return vs_[k]; }
  /// d x s matrix whose columns are the v_k.
  Matrix matrix() const;

 private:
  std::vector<Vector> vs_;
};

/// Best objective found plus a bound on how far the true supremum can lie
/// above it. Heuristic solvers report gap = +inf.
struct CertifiedValue {
  double value = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  Frame argmax;

  bool certified() const { return gap < std::numeric_limits<double>::infinity(); }
  Direction direction() const { return Direction::normalized(argmax[0]); }
};

/// How atoms are pushed to the line: x -> <x, v> or x -> <x, v>^2.
enum class SliceKind { linear, squared };

/// Pushforward of mu by x -> <x, v>.
Measure1D project(const DiscreteMeasure& mu, const Direction& v);

/// W_p between the pushforwards of mu and nu along v.
double sliced_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Vector& v, double p,
                    SliceKind kind = SliceKind::linear);

/// Direction-Lipschitz modulus of v -> sliced_value(mu, nu, v, p, kind) on
/// the sphere: R_mu + R_nu for linear slices, 2 (R_mu^2 + R_nu^2) for squared.
double direction_lipschitz(const DiscreteMeasure& mu, const DiscreteMeasure& nu, SliceKind kind);

/// A value no slice can exceed. Linear slices: W_p(mu, nu) in R^d, since
/// projection is 1-Lipschitz. Squared slices with p = 1: W_1 under the cost
/// ||xx^T - yy^T||_op. +inf when neither applies or the merged supports
/// have more than 256 atoms between them.
double sliced_upper_bound(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, SliceKind kind);

/// Max-sliced W_p by certified branch-and-bound over the sphere, d <= 3.
/// The true supremum lies in [value, value + gap] and gap <= tol.
CertifiedValue max_sliced_grid(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, double tol,
                               Execution exec = Execution::parallel, SliceKind kind = SliceKind::linear);

struct PgaOptions {
  int restarts = 16;
  std::uint64_t seed = 0;
  double initial_step = 0.5;
  double backtrack = 0.5;
  int max_backtracks = 50;
  int max_iterations = 1000;
  double move_tol = 1e-10;
  Execution exec = Execution::parallel;
};

/// Max-sliced W_p by projected gradient ascent on the sphere with restarts.
/// Always a lower bound; gap is +inf.
CertifiedValue max_sliced_pga(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                              const PgaOptions& options, SliceKind kind = SliceKind::linear);

/// W_1 between the s-dimensional pushforwards x -> (<v_1,x>, ..., <v_s,x>).
/// Exact transport when both supports have at most 64 atoms; otherwise the
/// best ridge lower bound sup_w W_1(<w, Qx>) over a fixed random family.
double w1s_objective(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const Frame& frame);

/// Projection-robust W_{1,s} by alternating projected gradient ascent over
/// the frame vectors. Lower bound, never below the s = 1 value.
CertifiedValue w1s_projection_robust(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int s,
                                     const PgaOptions& options);

}  // namespace mswlab
