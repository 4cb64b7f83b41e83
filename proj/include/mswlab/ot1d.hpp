#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mswlab {

/// Discrete probability measure on R, atoms sorted ascending with positions
/// closer than 1e-14 merged.
class Measure1D {
 public:
  Measure1D(std::span<const double> positions, std::span<const double> weights);

  static Measure1D dirac(double x);

  std::size_t size() const { return positions_.size(); }
  const std::vector<double>& positions() const { return positions_; }
  const std::vector<double>& weights() const { return weights_; }

  Measure1D shifted(double c) const;
  Measure1D scaled(double a) const;

 private:
  Measure1D() = default;
  std::vector<double> positions_;
  std::vector<double> weights_;
};

/// (int_0^1 |F_mu^{-1}(t) - F_nu^{-1}(t)|^p dt)^{1/p}, evaluated exactly as a
/// finite sum over the common refinement of the two quantile partitions.
double wasserstein_1d(const Measure1D& mu, const Measure1D& nu, double p);

/// W_1 as int |F_mu - F_nu| dx. Independent of the quantile route above.
double w1_cdf(const Measure1D& mu, const Measure1D& nu);

/// Exact transportation LP over all couplings (min-cost flow). Test oracle;
/// refuses supports above 8 atoms per side.
double lp_oracle(const Measure1D& mu, const Measure1D& nu, double p);

/// One cell of the monotone (quantile) coupling between two unsorted 1-D
/// point sets: `mass` moves from a[i] to b[j].
struct CouplingCell {
  std::size_t i;
  std::size_t j;
  double mass;
};

/// Scratch buffers for the hot 1-D kernels; reuse across calls to avoid
/// reallocating in solver inner loops.
struct QuantileWorkspace {
  std::vector<std::size_t> order_a;
  std::vector<std::size_t> order_b;
  std::vector<CouplingCell> coupling;
};

/// W_p^p between (a, wa) and (b, wb), inputs in any order. When
/// `keep_coupling` is set, ws.coupling receives the monotone coupling in
/// terms of the original indices.
double transport_cost_1d(std::span<const double> a, std::span<const double> wa,
                         std::span<const double> b, std::span<const double> wb,
                         double p, QuantileWorkspace& ws, bool keep_coupling = false);

/// |x|^p with exact shortcuts for p = 1, 2.
double abs_pow(double x, double p);

}  // namespace mswlab
