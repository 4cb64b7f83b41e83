#include "mswlab/chaining.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mswlab/error.hpp"

namespace mswlab::chaining {

namespace {

constexpr double kLipTol = 1e-12;
constexpr std::size_t kMaxEnumerated = 1'000'000;
constexpr std::size_t kMaxCoverClass = 20'000;

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
}

double ratio(double num, double t, double delta) { return num / (std::pow(t, 1.0 + delta) + 1.0); }

// max of (y0 + k (t - t0)) / (t^{1+delta} + 1) on [lo, hi], where the
// numerator is nonnegative throughout; the ratio is quasiconcave there.
double max_on_piece(double y0, double k, double t0, double lo, double hi, double delta) {
  auto g = [&](double t) { return ratio(std::max(0.0, y0 + k * (t - t0)), t, delta); };
  double best = g(lo);
  if (std::isfinite(hi)) best = std::max(best, g(hi));
  // Search in u = t / (1 + t) so unbounded pieces map to [u_lo, 1).
  auto to_t = [](double u) { return u / (1.0 - u); };
  double a = lo / (1.0 + lo);
  double b = std::isfinite(hi) ? hi / (1.0 + hi) : 1.0;
  constexpr double inv_phi = 0.6180339887498949;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(to_t(c));
  double gd = g(to_t(d));
  for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(to_t(c));
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(to_t(d));
    }
    best = std::max(best, std::max(gc, gd));
  }
  return best;
}

// max over t in [t0, t1] of |y0 + k (t - t0)| / (t^{1+delta} + 1), t >= 0.
double max_on_segment(double y0, double k, double t0, double t1, double delta) {
  std::vector<double> cuts{t0};
  if (k != 0.0) {
    const double root = t0 - y0 / k;
    if (root > t0 && root < t1) cuts.push_back(root);
  }
  cuts.push_back(t1);
  double best = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p];
    const double hi = cuts[p + 1];
    // Sign of the linear numerator on this piece.
    const double probe = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
    const double sgn = (y0 + k * (probe - t0)) >= 0.0 ? 1.0 : -1.0;
    best = std::max(best, max_on_piece(sgn * y0, sgn * k, t0, lo, hi, delta));
  }
  return best;
}

}  // namespace

double phi(long long n, int s, double delta) {
  if (n < 1) throw ValidationError("phi needs n >= 1");
  if (s < 1) throw ValidationError("phi needs s >= 1");
  check_delta(delta);
  const double dn = delta * static_cast<double>(n);
  if (s == 1) return 1.0 / std::sqrt(dn);
  if (s == 2) return std::log(dn + 2.0) / std::sqrt(dn);
  return std::pow(dn, -1.0 / s);
}

UniformGrid::UniformGrid(double half_width, int points) : a_(half_width), m_(points) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) throw ValidationError("grid half-width must be positive");
  if (points < 3 || points % 2 == 0) throw ValidationError("grid needs an odd number (>= 3) of points");
}

LipschitzGridFunction::LipschitzGridFunction(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size()) throw ValidationError("value count must match the grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("grid values must be finite");
  }
  if (values_[static_cast<std::size_t>(grid_.zero_index())] != 0.0) throw ValidationError("f(0) must be 0");
  const double h = grid_.step();
  for (std::size_t k = 0; k + 1 < values_.size(); ++k) {
    if (std::abs(values_[k + 1] - values_[k]) > h + kLipTol) throw ValidationError("function is not 1-Lipschitz on the grid");
  }
}

double LipschitzGridFunction::operator()(double x) const {
  const double a = grid_.half_width();
  if (x > a) return values_.back() + right_tail_slope() * (x - a);
  if (x < -a) return values_.front() + left_tail_slope() * (-a - x);
  const double pos = (x + a) / grid_.step();
  const auto k = std::min(static_cast<int>(std::floor(pos)), grid_.size() - 2);
  const double frac = pos - k;
  return (1.0 - frac) * values_[static_cast<std::size_t>(k)] + frac * values_[static_cast<std::size_t>(k + 1)];
}

double delta_norm_piecewise(const UniformGrid& grid, std::span<const double> values, double left_slope,
                            double right_slope, double delta) {
  check_delta(delta);
  if (static_cast<int>(values.size()) != grid.size()) throw ValidationError("value count must match the grid");
  const int z = grid.zero_index();
  const double h = grid.step();
  const double a = grid.half_width();
  const double inf = std::numeric_limits<double>::infinity();
  double best = 0.0;
  for (int k = z; k + 1 < grid.size(); ++k) {
    const double t0 = grid.point(k);
    const double slope = (values[static_cast<std::size_t>(k + 1)] - values[static_cast<std::size_t>(k)]) / h;
    best = std::max(best, max_on_segment(values[static_cast<std::size_t>(k)], slope, t0, grid.point(k + 1), delta));
  }
  for (int k = z; k > 0; --k) {
    const double t0 = -grid.point(k);
    const double slope = (values[static_cast<std::size_t>(k - 1)] - values[static_cast<std::size_t>(k)]) / h;
    best = std::max(best, max_on_segment(values[static_cast<std::size_t>(k)], slope, t0, -grid.point(k - 1), delta));
  }
  best = std::max(best, max_on_segment(values.back(), right_slope, a, inf, delta));
  best = std::max(best, max_on_segment(values.front(), left_slope, a, inf, delta));
  return best;
}

double delta_norm(const LipschitzGridFunction& f, double delta) {
  return delta_norm_piecewise(f.grid(), f.values(), f.left_tail_slope(), f.right_tail_slope(), delta);
}

LipschitzGridFunction kirszbraun_extend(const UniformGrid& grid, std::span<const int> indices,
                                        std::span<const double> values) {
  if (indices.size() != values.size() || indices.empty()) throw ValidationError("partial function is empty or ragged");
  bool has_zero = false;
  for (std::size_t p = 0; p < indices.size(); ++p) {
    if (indices[p] < 0 || indices[p] >= grid.size()) throw ValidationError("index outside the grid");
    if (indices[p] == grid.zero_index()) {
      has_zero = true;
      if (values[p] != 0.0) throw ValidationError("partial function must vanish at 0");
    }
    for (std::size_t q = 0; q < p; ++q) {
      const double dx = std::abs(grid.point(indices[p]) - grid.point(indices[q]));
      if (std::abs(values[p] - values[q]) > dx + kLipTol) throw ValidationError("partial function is not 1-Lipschitz");
    }
  }
  if (!has_zero) throw ValidationError("partial function must be defined at 0");

  std::vector<double> out(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < indices.size(); ++p) {
      m = std::min(m, values[p] + std::abs(grid.point(k) - grid.point(indices[p])));
    }
    out[static_cast<std::size_t>(k)] = m;
  }
  // Exact agreement on Omega (the min above can only differ by rounding).
  for (std::size_t p = 0; p < indices.size(); ++p) out[static_cast<std::size_t>(indices[p])] = values[p];
  return LipschitzGridFunction(grid, std::move(out));
}

double FunctionMetric::operator()(const LipschitzGridFunction& f, const LipschitzGridFunction& g) const {
  const auto& fv = f.values();
  const auto& gv = g.values();
  if (fv.size() != gv.size()) throw ValidationError("functions live on different grids");
  if (kind == MetricKind::sup) {
    double m = 0.0;
    for (std::size_t k = 0; k < fv.size(); ++k) m = std::max(m, std::abs(fv[k] - gv[k]));
    return m;
  }
  std::vector<double> diff(fv.size());
  for (std::size_t k = 0; k < fv.size(); ++k) diff[k] = fv[k] - gv[k];
  return delta_norm_piecewise(f.grid(), diff, f.left_tail_slope() - g.left_tail_slope(),
                              f.right_tail_slope() - g.right_tail_slope(), delta);
}

PackingResult greedy_pack(std::span<const LipschitzGridFunction> sample, const FunctionMetric& metric, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (sample.empty()) throw ValidationError("packing needs a nonempty sample");
  PackingResult out;
  std::vector<double> nearest(sample.size(), std::numeric_limits<double>::infinity());
  std::size_t pick = 0;
  for (;;) {
    out.representatives.push_back(pick);
    for (std::size_t i = 0; i < sample.size(); ++i) nearest[i] = std::min(nearest[i], metric(sample[i], sample[pick]));
    std::size_t far = 0;
    for (std::size_t i = 1; i < sample.size(); ++i) {
      if (nearest[i] > nearest[far]) far = i;
    }
    if (!(nearest[far] > eps)) break;
    pick = far;
  }
  out.count = out.representatives.size();
  return out;
}

std::vector<LipschitzGridFunction> enumerate_class(double a, int m, double value_step) {
  const UniformGrid grid(a, m);
  if (!(value_step > 0.0)) throw ValidationError("value_step must be positive");
  const double h = grid.step();
  const auto reach = static_cast<int>(std::floor(h / value_step + 1e-9));
  if (reach < 1) throw ValidationError("value_step must not exceed the grid step");
  const std::size_t choices = static_cast<std::size_t>(2 * reach + 1);
  const auto steps = static_cast<std::size_t>(m - 1);
  std::size_t total = 1;
  for (std::size_t k = 0; k < steps; ++k) {
    if (total > kMaxEnumerated / choices) throw ValidationError("class too large to enumerate");
    total *= choices;
  }

  const int z = grid.zero_index();
  std::vector<LipschitzGridFunction> out;
  out.reserve(total);
  std::vector<int> digits(steps, 0);
  std::vector<double> values(static_cast<std::size_t>(m));
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (std::size_t k = 0; k < steps; ++k) {
      digits[k] = static_cast<int>(c % choices) - reach;
      c /= choices;
    }
    // digits[0..z-1] are increments walking left from 0, the rest walking right.
    values[static_cast<std::size_t>(z)] = 0.0;
    for (int k = 1; k <= z; ++k) {
      values[static_cast<std::size_t>(z - k)] = values[static_cast<std::size_t>(z - k + 1)] + digits[static_cast<std::size_t>(k - 1)] * value_step;
      values[static_cast<std::size_t>(z + k)] = values[static_cast<std::size_t>(z + k - 1)] + digits[static_cast<std::size_t>(z + k - 1)] * value_step;
    }
    out.emplace_back(grid, values);
  }
  return out;
}

CoveringEntry cover_count(double a, int m, double value_step, const FunctionMetric& metric, double eps) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  const auto cls = enumerate_class(a, m, value_step);
  if (cls.size() > kMaxCoverClass) throw ValidationError("class too large for exact covering counts");

  CoveringEntry entry;
  entry.epsilon = eps;
  entry.pack_count = greedy_pack(cls, metric, eps).count;

  // Greedy set cover over closed eps-balls, centres drawn from the class.
  const std::size_t n = cls.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> ball(n * words, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (metric(cls[i], cls[j]) <= eps) {
        ball[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
        ball[j * words + i / 64] |= std::uint64_t{1} << (i % 64);
      }
    }
  }
  std::vector<std::uint64_t> uncovered(words, ~std::uint64_t{0});
  if (n % 64) uncovered.back() = (std::uint64_t{1} << (n % 64)) - 1;
  std::size_t left = n;
  std::size_t centres = 0;
  while (left > 0 && centres < entry.pack_count) {
    std::size_t best = 0;
    std::size_t best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (std::size_t w = 0; w < words; ++w) gain += static_cast<std::size_t>(std::popcount(ball[i * words + w] & uncovered[w]));
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    for (std::size_t w = 0; w < words; ++w) uncovered[w] &= ~ball[best * words + w];
    left -= best_gain;
    ++centres;
  }
  entry.cover_count = left == 0 ? std::min(centres, entry.pack_count) : entry.pack_count;
  return entry;
}

CoveringProfile::CoveringProfile(std::vector<Entry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw ValidationError("covering profile is empty");
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (!(entries_[k].epsilon > 0.0) || !std::isfinite(entries_[k].epsilon)) throw ValidationError("epsilon must be positive");
    if (entries_[k].count < 1) throw ValidationError("covering counts must be positive");
    if (k > 0) {
      if (!(entries_[k].epsilon < entries_[k - 1].epsilon)) throw ValidationError("epsilon must be strictly decreasing");
      if (entries_[k].count < entries_[k - 1].count) throw ValidationError("counts must not decrease as epsilon decreases");
    }
  }
  if (entries_.front().count != 1) throw ValidationError("largest epsilon must have count 1");
}

double dudley_integral(const CoveringProfile& profile) {
  const auto& e = profile.entries();
  double total = 0.0;
  for (std::size_t k = 0; k < e.size(); ++k) {
    const double lower = k + 1 < e.size() ? e[k + 1].epsilon : 0.0;
    total += (e[k].epsilon - lower) * std::sqrt(std::log(static_cast<double>(e[k].count)));
  }
  return total;
}

}  // namespace mswlab::chaining
