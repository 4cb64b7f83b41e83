#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mswlab {

struct TransportPlanEntry {
  std::size_t source;
  std::size_t target;
  double mass;
};

struct TransportSolution {
  double cost = 0.0;
  std::vector<TransportPlanEntry> plan;
};

/// Exact discrete optimal transport: minimises sum_ij gamma_ij cost(i, j)
/// over couplings of `supply` and `demand` (both summing to 1). Successive
/// shortest paths with Dijkstra on reduced costs; dense O((n+m)^2) per
/// augmentation, meant for supports up to a few hundred atoms.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const Eigen::MatrixXd& cost);

}  // namespace mswlab
