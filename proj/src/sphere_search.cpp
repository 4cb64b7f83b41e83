#include "mswlab/sphere_search.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "mswlab/error.hpp"

namespace mswlab {

namespace {

constexpr std::size_t kMaxEvaluations = 200'000'000;

struct Cell {
  int face;      // cube face (d = 3); unused for d = 2
  double s;      // angle (d = 2) or first face coordinate
  double t;      // second face coordinate (d = 3)
  double half;   // half-width in parameter units
};

Vector cell_direction(int dim, const Cell& c) {
  Vector v(dim);
  if (dim == 2) {
    v << std::cos(c.s), std::sin(c.s);
    return v;
  }
  v.setZero();
  v[c.face] = 1.0;
  v[(c.face + 1) % 3] = c.s;
  v[(c.face + 2) % 3] = c.t;
  return v.normalized();
}

// Chord radius of the cell's image on the sphere.
double cell_radius(int dim, const Cell& c) {
  if (dim == 2) return 2.0 * std::sin(0.5 * c.half);
  return std::numbers::sqrt2 * c.half;
}

void split(int dim, const Cell& c, std::vector<Cell>& out) {
  const double h = 0.5 * c.half;
  if (dim == 2) {
    out.push_back({0, c.s - h, 0.0, h});
    out.push_back({0, c.s + h, 0.0, h});
    return;
  }
  for (double ds : {-h, h}) {
    for (double dt : {-h, h}) out.push_back({c.face, c.s + ds, c.t + dt, h});
  }
}

std::vector<Cell> initial_cells(int dim) {
  std::vector<Cell> cells;
  if (dim == 2) {
    constexpr int k = 64;
    const double h = 0.5 * std::numbers::pi / k;
    for (int i = 0; i < k; ++i) cells.push_back({0, (2 * i + 1) * h, 0.0, h});
    return cells;
  }
  constexpr int k = 8;
  const double h = 1.0 / k;
  for (int face = 0; face < 3; ++face) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) cells.push_back({face, -1.0 + (2 * i + 1) * h, -1.0 + (2 * j + 1) * h, h});
    }
  }
  return cells;
}

}  // namespace

SphereSearchResult certified_sphere_max(int dim, const std::function<double(const Vector&)>& f, double lipschitz,
                                        double tol, Execution exec, double upper) {
  if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
  if (dim < 1) throw ValidationError("dimension must be positive");
  if (dim > 3) throw UnsupportedError("certified sphere search supports d <= 3 only (got d = " + std::to_string(dim) + ")");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw ValidationError("Lipschitz modulus must be finite");

  SphereSearchResult result;
  if (dim == 1) {
    result.argmax = Vector::Ones(1);
    result.value = f(result.argmax);
    result.evaluations = 1;
    return result;
  }

  std::vector<Cell> active = initial_cells(dim);
  std::vector<double> values;
  std::vector<Cell> next;
  double best = -std::numeric_limits<double>::infinity();
  double worst_discarded = -std::numeric_limits<double>::infinity();

  while (!active.empty()) {
    values.assign(active.size(), 0.0);
    const auto count = static_cast<std::ptrdiff_t>(active.size());
    const bool par = exec == Execution::parallel && count >= 64;
#pragma omp parallel for schedule(dynamic, 32) if (par)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      values[static_cast<std::size_t>(k)] = f(cell_direction(dim, active[static_cast<std::size_t>(k)]));
    }
    result.evaluations += active.size();
    if (result.evaluations > kMaxEvaluations) throw ExperimentError("sphere search exceeded its evaluation budget");

    for (std::size_t k = 0; k < active.size(); ++k) {
      if (values[k] > best) {
        best = values[k];
        result.argmax = cell_direction(dim, active[k]);
      }
    }

    next.clear();
    for (std::size_t k = 0; k < active.size(); ++k) {
      // The 1e-13 relative term covers rounding in the evaluations themselves.
      double bound = std::min(values[k] + lipschitz * cell_radius(dim, active[k]), upper);
      bound += 1e-13 * (1.0 + std::abs(bound));
      if (bound <= best + tol || active[k].half < 1e-12) {
        worst_discarded = std::max(worst_discarded, bound);
      } else {
        split(dim, active[k], next);
      }
    }
    active.swap(next);
  }

  result.value = best;
  result.gap = std::max(0.0, worst_discarded - best);
  return result;
}

}  // namespace mswlab
