#include "mswlab/ot1d.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mswlab/error.hpp"
#include "mswlab/transport.hpp"

namespace mswlab {

namespace {

constexpr double kMergeTol = 1e-14;
constexpr double kWeightSumTol = 1e-12;

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("p must be a finite real >= 1");
}

// Walks the common refinement of two quantile partitions given in sorted
// order; `emit(ia, ib, mass)` runs for every segment of positive length.
// Cumulative sums (not remaining masses) drive the walk so rounding never
// accumulates; a final sliver below the weight-sum tolerance is dropped.
template <class WA, class WB, class Emit>
void walk_quantiles(std::size_t na, WA&& weight_a, std::size_t nb, WB&& weight_b, Emit&& emit) {
  std::size_t i = 0;
  std::size_t j = 0;
  double cum_a = weight_a(0);
  double cum_b = weight_b(0);
  double t = 0.0;
  while (i < na && j < nb) {
    const double next = std::min(cum_a, cum_b);
    if (next > t) {
      emit(i, j, next - t);
      t = next;
    }
    const bool adv_a = cum_a <= next;
    const bool adv_b = cum_b <= next;
    if (adv_a && ++i < na) cum_a += weight_a(i);
    if (adv_b && ++j < nb) cum_b += weight_b(j);
  }
}

}  // namespace

double abs_pow(double x, double p) {
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  return std::pow(a, p);
}

Measure1D::Measure1D(std::span<const double> positions, std::span<const double> weights) {
  if (positions.size() != weights.size()) throw ValidationError("positions and weights differ in length");
  if (positions.empty()) throw ValidationError("1-D measure needs at least one atom");
  double total = 0.0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (!std::isfinite(positions[k])) throw ValidationError("positions must be finite");
    if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) throw ValidationError("weights must be nonnegative");
    total += weights[k];
  }
  if (std::abs(total - 1.0) > kWeightSumTol) throw ValidationError("weights must sum to 1");

  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return positions[a] < positions[b]; });

  for (std::size_t k : order) {
    if (weights[k] == 0.0) continue;
    if (!positions_.empty() && positions[k] - positions_.back() <= kMergeTol) {
      weights_.back() += weights[k];
    } else {
      positions_.push_back(positions[k]);
      weights_.push_back(weights[k]);
    }
  }
  if (positions_.empty()) throw ValidationError("1-D measure has no mass");
}

Measure1D Measure1D::dirac(double x) {
  const double w = 1.0;
  return Measure1D(std::span<const double>(&x, 1), std::span<const double>(&w, 1));
}

Measure1D Measure1D::shifted(double c) const {
  Measure1D out;
  out.weights_ = weights_;
  out.positions_.reserve(positions_.size());
  for (double x : positions_) out.positions_.push_back(x + c);
  return out;
}

Measure1D Measure1D::scaled(double a) const {
  std::vector<double> pos;
  pos.reserve(positions_.size());
  for (double x : positions_) pos.push_back(a * x);
  return Measure1D(pos, weights_);
}

double wasserstein_1d(const Measure1D& mu, const Measure1D& nu, double p) {
  check_p(p);
  const auto& xa = mu.positions();
  const auto& xb = nu.positions();
  double total = 0.0;
  walk_quantiles(
      xa.size(), [&](std::size_t i) { return mu.weights()[i]; }, xb.size(),
      [&](std::size_t j) { return nu.weights()[j]; },
      [&](std::size_t i, std::size_t j, double mass) { total += mass * abs_pow(xa[i] - xb[j], p); });
  return p == 1.0 ? total : std::pow(total, 1.0 / p);
}

double w1_cdf(const Measure1D& mu, const Measure1D& nu) {
  const auto& xa = mu.positions();
  const auto& xb = nu.positions();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double x = std::min(xa.front(), xb.front());
  double total = 0.0;
  while (i < xa.size() || j < xb.size()) {
    const double next = std::min(i < xa.size() ? xa[i] : INFINITY, j < xb.size() ? xb[j] : INFINITY);
    total += (next - x) * std::abs(fa - fb);
    x = next;
    while (i < xa.size() && xa[i] == next) fa += mu.weights()[i++];
    while (j < xb.size() && xb[j] == next) fb += nu.weights()[j++];
  }
  return total;
}

double lp_oracle(const Measure1D& mu, const Measure1D& nu, double p) {
  check_p(p);
  if (mu.size() > 8 || nu.size() > 8) throw ValidationError("lp_oracle is limited to 8 atoms per side");
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(mu.size()), static_cast<Eigen::Index>(nu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          abs_pow(mu.positions()[i] - nu.positions()[j], p);
    }
  }
  const double c = solve_transport(mu.weights(), nu.weights(), cost).cost;
  return std::pow(std::max(c, 0.0), 1.0 / p);
}

double transport_cost_1d(std::span<const double> a, std::span<const double> wa, std::span<const double> b,
                         std::span<const double> wb, double p, QuantileWorkspace& ws, bool keep_coupling) {
  auto& oa = ws.order_a;
  auto& ob = ws.order_b;
  oa.resize(a.size());
  ob.resize(b.size());
  std::iota(oa.begin(), oa.end(), 0);
  std::iota(ob.begin(), ob.end(), 0);
  std::sort(oa.begin(), oa.end(), [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });
  std::sort(ob.begin(), ob.end(), [&](std::size_t x, std::size_t y) { return b[x] < b[y]; });
  if (keep_coupling) ws.coupling.clear();

  double total = 0.0;
  walk_quantiles(
      a.size(), [&](std::size_t i) { return wa[oa[i]]; }, b.size(), [&](std::size_t j) { return wb[ob[j]]; },
      [&](std::size_t i, std::size_t j, double mass) {
        const std::size_t ia = oa[i];
        const std::size_t jb = ob[j];
        total += mass * abs_pow(a[ia] - b[jb], p);
        if (keep_coupling) ws.coupling.push_back({ia, jb, mass});
      });
  return total;
}

}  // namespace mswlab
