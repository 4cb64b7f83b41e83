#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mswlab::chaining {

/// Rate function used by the chaining bounds:
///   s = 1: (delta n)^{-1/2}
///   s = 2: ln(delta n + 2) (delta n)^{-1/2}
///   s >= 3: (delta n)^{-1/s}
double phi(long long n, int s, double delta);

/// m equally spaced points on [-a, a]; m odd so that 0 is a grid point.
class UniformGrid {
 public:
  UniformGrid(double half_width, int points);

  double half_width() const { return a_; }
  int size() const { return m_; }
  double step() const { return 2.0 * a_ / (m_ - 1); }
  int zero_index() const { return (m_ - 1) / 2; }
  double point(int k) const { return -a_ + k * step(); }

 private:
  double a_;
  int m_;
};

/// Grid values of a 1-Lipschitz function with f(0) = 0. Off the grid it is
/// the linear interpolant on [-a, a]; beyond +-a it continues with slope
/// +-1 away from zero (|f(x)| = |f(+-a)| + (|x| - a)), the largest 1-Lipschitz
/// extension in absolute value.
class LipschitzGridFunction {
 public:
  LipschitzGridFunction(UniformGrid grid, std::vector<double> values);

  const UniformGrid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double x) const;
  /// d|f|/d|x| beyond the right (+a) and left (-a) ends: +1 or -1.
  double right_tail_slope() const { return values_.back() >= 0.0 ? 1.0 : -1.0; }
  double left_tail_slope() const { return values_.front() >= 0.0 ? 1.0 : -1.0; }

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

/// sup_x |f(x)| / (|x|^{1+delta} + 1) over all of R, for f given by grid
/// values with linear tails beyond +-a (tail slopes are d f / d|x|). Exact up to the
/// golden-section tolerance; each linear piece makes the ratio quasiconcave.
double delta_norm_piecewise(const UniformGrid& grid, std::span<const double> values, double left_slope,
                            double right_slope, double delta);

double delta_norm(const LipschitzGridFunction& f, double delta);

/// tau(h)(x) = min_{y in Omega} h(y) + |x - y| on the full grid. Omega is
/// given by grid indices and must contain the zero index with h = 0 there.
LipschitzGridFunction kirszbraun_extend(const UniformGrid& grid, std::span<const int> indices,
                                        std::span<const double> values);

enum class MetricKind { sup, delta };

struct FunctionMetric {
  MetricKind kind = MetricKind::sup;
  double delta = 1.0;  // used by MetricKind::delta

  double operator()(const LipschitzGridFunction& f, const LipschitzGridFunction& g) const;
};

struct PackingResult {
  std::size_t count = 0;
  std::vector<std::size_t> representatives;  // indices into the input sample
};

/// Greedy farthest-point packing: a maximal subset whose pairwise distances
/// all exceed eps. Ties go to the lowest index.
PackingResult greedy_pack(std::span<const LipschitzGridFunction> sample, const FunctionMetric& metric, double eps);

/// Every grid function on (a, m) with f(0) = 0 whose increments are integer
/// multiples of value_step bounded by the grid step.
std::vector<LipschitzGridFunction> enumerate_class(double a, int m, double value_step);

struct CoveringEntry {
  double epsilon = 0.0;
  std::size_t cover_count = 0;
  std::size_t pack_count = 0;
};

/// Covering and packing counts of the enumerated class at eps. The cover is
/// the smaller of a greedy set cover and the greedy packing itself (a maximal
/// eps-separated set is an eps-cover), so cover_count <= pack_count always.
CoveringEntry cover_count(double a, int m, double value_step, const FunctionMetric& metric, double eps);

/// Tabulated eps -> N(eps), eps strictly decreasing, counts nondecreasing,
/// first entry with count 1 (eps at or beyond the diameter).
class CoveringProfile {
 public:
  struct Entry {
    double epsilon;
    std::size_t count;
  };
  explicit CoveringProfile(std::vector<Entry> entries);
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// int_0^inf sqrt(ln N(eps)) d eps for the step function that takes the value
/// count_k on [eps_{k+1}, eps_k) (with eps_K = 0).
double dudley_integral(const CoveringProfile& profile);

}  // namespace mswlab::chaining
