#include "mswlab/transport.hpp"

#include <algorithm>
#include <limits>

#include "mswlab/error.hpp"

namespace mswlab {

namespace {
constexpr double kMassEps = 1e-15;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const Eigen::MatrixXd& cost) {
  const std::size_t n = supply.size();
  const std::size_t m = demand.size();
  if (n == 0 || m == 0) throw ValidationError("transport needs nonempty marginals");
  if (static_cast<std::size_t>(cost.rows()) != n || static_cast<std::size_t>(cost.cols()) != m) {
    throw ValidationError("cost matrix shape does not match marginals");
  }

  std::vector<double> supply_left(supply.begin(), supply.end());
  std::vector<double> demand_left(demand.begin(), demand.end());
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));

  // Nodes 0..n-1 are sources, n..n+m-1 targets. Forward arcs i->j are
  // uncapacitated; reverse arcs j->i exist while flow(i, j) > 0.
  const std::size_t nodes = n + m;
  std::vector<double> potential(nodes, 0.0);
  std::vector<double> dist(nodes);
  std::vector<std::ptrdiff_t> parent(nodes);
  std::vector<char> done(nodes);

  for (;;) {
    double remaining = 0.0;
    for (double s : supply_left) remaining += s;
    if (remaining <= kMassEps * static_cast<double>(n)) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (supply_left[i] > kMassEps) dist[i] = 0.0;
    }

    for (std::size_t step = 0; step < nodes; ++step) {
      std::size_t u = nodes;
      double best = kInf;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == nodes) break;
      done[u] = 1;
      if (u < n) {
        const auto iu = static_cast<Eigen::Index>(u);
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t v = n + j;
          if (done[v]) continue;
          const double reduced = cost(iu, static_cast<Eigen::Index>(j)) + potential[u] - potential[v];
          const double nd = dist[u] + std::max(reduced, 0.0);
          if (nd < dist[v]) {
            dist[v] = nd;
            parent[v] = static_cast<std::ptrdiff_t>(u);
          }
        }
      } else {
        const auto ju = static_cast<Eigen::Index>(u - n);
        for (std::size_t i = 0; i < n; ++i) {
          if (done[i] || flow(static_cast<Eigen::Index>(i), ju) <= kMassEps) continue;
          const double reduced = -cost(static_cast<Eigen::Index>(i), ju) + potential[u] - potential[i];
          const double nd = dist[u] + std::max(reduced, 0.0);
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = static_cast<std::ptrdiff_t>(u);
          }
        }
      }
    }

    std::size_t sink = nodes;
    for (std::size_t j = 0; j < m; ++j) {
      if (demand_left[j] > kMassEps && dist[n + j] < kInf && (sink == nodes || dist[n + j] < dist[sink])) {
        sink = n + j;
      }
    }
    if (sink == nodes) break;  // marginals differ by rounding only

    const double reach = dist[sink];
    for (std::size_t v = 0; v < nodes; ++v) potential[v] += std::min(dist[v], reach);

    // Bottleneck along the path.
    double amount = demand_left[sink - n];
    std::size_t v = sink;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u >= n) amount = std::min(amount, flow(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u - n)));
      v = u;
    }
    const std::size_t source = v;
    amount = std::min(amount, supply_left[source]);

    v = sink;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u < n) {
        flow(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v - n)) += amount;
      } else {
        double& f = flow(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u - n));
        f = (f - amount <= kMassEps) ? 0.0 : f - amount;
      }
      v = u;
    }
    supply_left[source] -= amount;
    demand_left[sink - n] -= amount;
  }

  TransportSolution out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double f = flow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (f > 0.0) {
        out.cost += f * cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        out.plan.push_back({i, j, f});
      }
    }
  }
  return out;
}

}  // namespace mswlab
