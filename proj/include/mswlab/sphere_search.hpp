#pragma once

#include <cstddef>
#include <functional>
#include <limits>

#include "mswlab/execution.hpp"
#include "mswlab/measures.hpp"

namespace mswlab {

struct SphereSearchResult {
  double value = 0.0;
  double gap = 0.0;
  Vector argmax;
  std::size_t evaluations = 0;
};

/// Certified maximisation of an L-Lipschitz (in chord distance), even
/// function f(v) = f(-v) over the unit sphere of R^d, d in {1, 2, 3}.
///
/// Branch and bound over a parameterisation of a half sphere: angles in
/// [0, pi) for d = 2, the three positive faces of the cube [-1,1]^3 for d = 3
/// (radial projection from outside the unit ball is 1-Lipschitz, so a face
/// cell of half-side w maps into a chord ball of radius sqrt(2) w). A cell
/// with centre value f_c and chord radius r is discarded once f_c + L r is at
/// most best + tol; the reported gap is the largest discarded bound minus the
/// final best, so sup f lies in [value, value + gap] and gap <= tol.
///
/// `upper`, when finite, is a known bound sup f <= upper; it caps every cell
/// bound, which settles flat objectives without subdividing to width tol/L.
///
/// `f` is called concurrently under Execution::parallel.
SphereSearchResult certified_sphere_max(int dim, const std::function<double(const Vector&)>& f, double lipschitz,
                                        double tol, Execution exec,
                                        double upper = std::numeric_limits<double>::infinity());

}  // namespace mswlab
