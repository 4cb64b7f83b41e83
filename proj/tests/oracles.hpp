#pragma once

// Brute-force reference computations for the tests. Nothing here calls the
// library's solvers.

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>
#include <vector>

namespace oracle {

inline double binomial_pmf(int n, int k, double q) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(q) +
                  (n - k) * std::log1p(-q));
}

/// min over permutations of (1/n) sum |a_i - b_sigma(i)|^p: optimal transport
/// between uniform measures on n points each.
inline double permutation_cost(const std::vector<double>& a, const std::vector<double>& b, double p) {
  std::vector<int> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += std::pow(std::abs(a[i] - b[static_cast<std::size_t>(perm[i])]), p);
    best = std::min(best, c / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// E W_{p,1}(two_point(e1), empirical of n draws) = E 2 |S/n - 1/2|^{1/p}, S ~ Bin(n, 1/2).
inline double two_point_expectation(int n, double p) {
  double e = 0.0;
  for (int s = 0; s <= n; ++s) {
    e += binomial_pmf(n, s, 0.5) * 2.0 * std::pow(std::abs(static_cast<double>(s) / n - 0.5), 1.0 / p);
  }
  return e;
}

/// Midpoint rule for int_0^hi g.
template <class G>
double quadrature(G g, double hi, int pieces) {
  const double h = hi / pieces;
  double s = 0.0;
  for (int k = 0; k < pieces; ++k) s += g((k + 0.5) * h);
  return s * h;
}

using Bits = std::bitset<128>;

// Bron-Kerbosch with pivoting.
inline void max_clique(const std::vector<Bits>& adj, Bits r, Bits p, Bits x, std::size_t& best) {
  if (p.none() && x.none()) {
    best = std::max(best, r.count());
    return;
  }
  if (r.count() + p.count() <= best) return;
  std::size_t pivot = 0, pivot_deg = 0;
  const Bits px = p | x;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    if (px[u] && (p & adj[u]).count() >= pivot_deg) {
      pivot = u;
      pivot_deg = (p & adj[u]).count();
    }
  }
  const Bits cand = p & ~adj[pivot];
  for (std::size_t v = 0; v < adj.size(); ++v) {
    if (!cand[v]) continue;
    Bits r2 = r;
    r2.set(v);
    max_clique(adj, r2, p & adj[v], x & adj[v], best);
    p.reset(v);
    x.set(v);
  }
}

/// Size of a maximum clique of a graph on at most 128 vertices.
inline std::size_t max_clique_size(const std::vector<Bits>& adj) {
  Bits all;
  for (std::size_t i = 0; i < adj.size(); ++i) all.set(i);
  std::size_t best = 0;
  max_clique(adj, Bits(), all, Bits(), best);
  return best;
}

}  // namespace oracle
