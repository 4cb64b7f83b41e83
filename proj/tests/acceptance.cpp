// Acceptance suite: one PASS/FAIL line per criterion, exit 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "mswlab/chaining.hpp"
#include "mswlab/config.hpp"
#include "mswlab/measures.hpp"
#include "mswlab/ot1d.hpp"
#include "mswlab/ratelab.hpp"
#include "mswlab/report.hpp"
#include "mswlab/rng.hpp"
#include "mswlab/sliced.hpp"
#include "mswlab/symlift.hpp"
#include "oracles.hpp"

using namespace mswlab;
using namespace mswlab::ratelab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Measure1D random_measure_1d(Rng& rng, int k) {
  std::vector<double> x(static_cast<std::size_t>(k)), w(static_cast<std::size_t>(k));
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = 4 * rng.uniform() - 2;
    w[i] = 0.05 + rng.uniform();
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return Measure1D(x, w);
}

DiscreteMeasure random_measure(Rng& rng, int dim, int atoms) {
  PointMatrix pts(dim, atoms);
  std::vector<double> w(static_cast<std::size_t>(atoms));
  for (int i = 0; i < atoms; ++i) {
    for (int k = 0; k < dim; ++k) pts(k, i) = rng.normal();
    w[static_cast<std::size_t>(i)] = 0.1 + rng.uniform();
  }
  return DiscreteMeasure::normalized(pts, w);
}

DiscreteMeasure random_symmetric(Rng& rng, int dim, int pairs) {
  PointMatrix pts(dim, 2 * pairs);
  std::vector<double> w(static_cast<std::size_t>(2 * pairs));
  for (int i = 0; i < pairs; ++i) {
    for (int k = 0; k < dim; ++k) pts(k, i) = rng.normal();
    pts.col(pairs + i) = -pts.col(i);
    w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(pairs + i)] = 0.1 + rng.uniform();
  }
  return DiscreteMeasure::normalized(pts, w);
}

int atoms_in(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string verdict_line(const Verdict& v) {
  return fmt("%s %s (%s)", v.name.c_str(), v.pass ? "ok" : "failed", v.detail.c_str());
}

Outcome ot_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto mu = random_measure_1d(rng, atoms_in(rng, 1, 8));
    const auto nu = random_measure_1d(rng, atoms_in(rng, 1, 8));
    const double p = std::array{1.0, 1.5, 2.0, 3.0}[static_cast<std::size_t>(i % 4)];
    worst = std::max(worst, std::abs(wasserstein_1d(mu, nu, p) - lp_oracle(mu, nu, p)));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 10, fmt("max |diff| %.3g over 1000 instances, %.2f s", worst, secs)};
}

Outcome certified_solver() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(202);
  int disjoint = 0, pga_inside = 0;
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_measure(rng, 2, atoms_in(rng, 1, 8));
    const auto nu = random_measure(rng, 2, atoms_in(rng, 1, 8));
    const double p = 1.0 + (i % 3) * 0.5;
    const auto coarse = max_sliced_grid(mu, nu, p, 1e-3);
    const auto fine = max_sliced_grid(mu, nu, p, 1e-5);
    if (coarse.value > fine.value + fine.gap || fine.value > coarse.value + coarse.gap) ++disjoint;
    PgaOptions opt;
    opt.seed = static_cast<std::uint64_t>(i);
    const double v = max_sliced_pga(mu, nu, p, opt).value;
    if (v >= fine.value - 1e-12 && v <= fine.value + fine.gap + 1e-12) ++pga_inside;
  }
  const double secs = seconds_since(t0);
  return {disjoint == 0 && pga_inside >= 190 && secs < 60,
          fmt("%d disjoint enclosures, PGA inside on %d/200, %.2f s", disjoint, pga_inside, secs)};
}

Outcome dirac_identity() {
  Rng rng(303);
  int bad = 0;
  double worst = 0;
  const DiscreteMeasure d2 = DiscreteMeasure::dirac(Vector::Zero(2));
  const DiscreteMeasure d3 = DiscreteMeasure::dirac(Vector::Zero(3));
  for (int dim : {2, 3}) {
    for (int i = 0; i < 50; ++i) {
      const auto mu = random_measure(rng, dim, atoms_in(rng, 1, 8));
      const auto r = max_sliced_grid(mu, dim == 2 ? d2 : d3, 2.0, 1e-4);
      const double err = std::abs(r.value - w21_dirac_identity(mu));
      worst = std::max(worst, err - r.gap);
      if (err > r.gap + 1e-12) ++bad;
    }
  }
  return {bad == 0, fmt("%d of 100 outside the certificate (worst excess %.3g)", bad, worst)};
}

Outcome lift_inequality() {
  Rng rng(404);
  int violations = 0;
  double worst = -INFINITY;
  for (int i = 0; i < 200; ++i) {
    const auto mu = random_symmetric(rng, 2, atoms_in(rng, 1, 4));
    const auto nu = random_symmetric(rng, 2, atoms_in(rng, 1, 4));
    const auto w2 = max_sliced_grid(mu, nu, 2.0, 1e-5);
    const auto lift = lifted_w11(mu, nu, 1e-5);
    // w2.value is attained, so w2.value^2 <= W21^2 <= lifted <= lift.value + lift.gap.
    const double excess = w2.value * w2.value - (lift.value + lift.gap);
    worst = std::max(worst, excess);
    if (excess > 1e-12) ++violations;
  }
  return {violations == 0, fmt("%d violations on 200 pairs (max lhs - rhs %.3g)", violations, worst)};
}

RateExperimentConfig base_config(const std::string& name, MeasureSpec measure, Estimand estimand,
                                 std::vector<long long> grid, int trials, std::uint64_t seed) {
  RateExperimentConfig c;
  c.name = name;
  c.measure = std::move(measure);
  c.estimand = estimand;
  c.n_grid = std::move(grid);
  c.trials = trials;
  c.base_seed = seed;
  return c;
}

MeasureSpec two_point_spec() { return MeasureSpec{"two_point", {1, 0}, 0, {}, {}, "", false}; }
MeasureSpec scaled_basis_spec(int d) { return MeasureSpec{"scaled_basis", {}, d, {}, {}, "", false}; }

Outcome lower_bound_w11() {
  std::ostringstream detail;
  bool pass = true;
  {
    auto c = base_config("tp", two_point_spec(), Estimand::ew11, {4, 16, 64, 256}, 400, 5);
    c.solver.kind = SolverKind::grid;
    c.solver.tol = 1e-6;
    c.verdicts.lower_bound_w11 = true;
    const auto r = run_experiment(c);
    pass = pass && r.all_pass();
    detail << "two_point: " << verdict_line(r.verdicts.front()) << "; ";
  }
  {
    auto c = base_config("sb4", scaled_basis_spec(4), Estimand::ew11, {4, 16, 64, 256}, 400, 6);
    c.solver.kind = SolverKind::pga;
    c.verdicts.lower_bound_w11 = true;
    const auto r = run_experiment(c);
    pass = pass && r.all_pass();
    detail << "scaled_basis(4): " << verdict_line(r.verdicts.front()) << "; ";
  }
  // Exact expectation for two_point: E W11 = E 2 |S/n - 1/2|, bound 1/(2 sqrt(2n)) since ||x|| = 1.
  int exact_bad = 0;
  for (int n = 1; n <= 12; ++n) {
    if (oracle::two_point_expectation(n, 1.0) < lower_bound_w11_rhs(build_measure(two_point_spec()).mu, n)) ++exact_bad;
  }
  pass = pass && exact_bad == 0;
  detail << "exact n<=12: " << exact_bad << " below the bound";
  return {pass, detail.str()};
}

Outcome rate_shape() {
  const auto t0 = std::chrono::steady_clock::now();
  auto c = base_config("sb8", scaled_basis_spec(8), Estimand::ew11, {16, 64, 256, 1024}, 200, 7);
  c.solver.kind = SolverKind::pga;
  c.solver.restarts = 16;
  c.verdicts.expected_slope = -0.5;
  c.verdicts.slope_tolerance = 0.15;
  c.verdicts.constant_trend = true;
  const auto r = run_experiment(c);
  const double secs = seconds_since(t0);
  std::string detail = fmt("slope %.4f; ", r.slope);
  for (const auto& v : r.verdicts) detail += verdict_line(v) + "; ";
  detail += fmt("%.1f s", secs);
  return {r.all_pass() && secs < 600, detail};
}

Outcome extremizer_p2() {
  auto c = base_config("tp2", two_point_spec(), Estimand::ewp1, {4, 16, 64, 256}, 400, 8);
  c.p = 2.0;
  c.solver.kind = SolverKind::grid;
  c.solver.tol = 1e-6;
  c.verdicts.expected_slope = -0.25;
  c.verdicts.slope_tolerance = 0.1;
  const auto r = run_experiment(c);
  int mismatches = 0;
  std::string rows;
  for (const auto& row : r.rows) {
    if (row.n > 64) continue;
    const double exact = oracle::two_point_expectation(static_cast<int>(row.n), 2.0);
    const bool ok = std::abs(row.mean - exact) <= 3 * row.std_error;
    if (!ok) ++mismatches;
    rows += fmt(" n=%lld mean %.4f exact %.4f;", row.n, row.mean, exact);
  }
  return {r.all_pass() && mismatches == 0, fmt("slope %.4f;%s %d outside 3 SE", r.slope, rows.c_str(), mismatches)};
}

Outcome symmetrized_lower() {
  const MeasureSpec spec{"diagonal", {}, 0, {}, {0.25, 0.25, 0.25, 0.25}, "", false};
  const auto m = build_measure(spec);
  // Exact E[witness^2] at n = 2 over all ordered pairs of atoms.
  double exact = 0;
  PointMatrix x(m.mu.dim(), 2);
  for (std::size_t i = 0; i < m.mu.size(); ++i) {
    for (std::size_t j = 0; j < m.mu.size(); ++j) {
      x.col(0) = m.mu.point(i);
      x.col(1) = m.mu.point(j);
      const double w = std::max(witness_covariance(x, m.summary.op_norm), witness_binomial(x, *m.diagonal));
      exact += m.mu.weight(i) * m.mu.weight(j) * w * w;
    }
  }
  const double rhs2 = symmetrized_lower_rhs(m.summary, 2);
  const bool exact_ok = exact >= rhs2;

  auto c = base_config("diag", spec, Estimand::e_witness_sq, {8, 32}, 400, 9);
  c.verdicts.symmetrized_lower = true;
  const auto r = run_experiment(c);
  return {exact_ok && r.all_pass(),
          fmt("n=2 exact %.6f vs %.6f; %s", exact, rhs2, verdict_line(r.verdicts.front()).c_str())};
}

Outcome symmetrized_upper() {
  auto c = base_config("sym", scaled_basis_spec(4), Estimand::ew21_sq_symmetrized, {8, 32, 128, 512}, 200, 10);
  c.solver.kind = SolverKind::pga;
  c.solver.restarts = 16;
  c.verdicts.symmetrized_upper = true;
  c.verdicts.c_cap = 50;
  const auto r = run_experiment(c);
  return {r.all_pass(), verdict_line(r.verdicts.front())};
}

Outcome lifted_gaussian() {
  auto c = base_config("lift", scaled_basis_spec(4), Estimand::e_gaussian_lifted_opnorm, {8, 32, 128}, 200, 11);
  c.verdicts.lifted_gaussian = true;
  c.verdicts.c_cap = 50;
  const auto r = run_experiment(c);
  return {r.all_pass(), verdict_line(r.verdicts.front())};
}

Outcome covering() {
  using namespace mswlab::chaining;
  const auto t0 = std::chrono::steady_clock::now();
  const FunctionMetric sup{};
  bool pass = true;
  std::string detail;
  for (double eps : {1.0, 0.5, 0.25}) {
    const auto e = cover_count(1.0, 9, 0.25, sup, eps);
    const auto half = cover_count(1.0, 9, 0.25, sup, eps / 2);
    const double log_n = std::log(static_cast<double>(e.cover_count));
    const bool ok = e.cover_count <= e.pack_count && e.pack_count <= half.cover_count && log_n <= 10 / eps;
    pass = pass && ok;
    detail += fmt("eps %.2f: N %zu <= Npack %zu <= N(eps/2) %zu, log N %.2f; ", eps, e.cover_count, e.pack_count,
                  half.cover_count, log_n);
  }
  const auto cls = enumerate_class(1.0, 5, 0.5);
  for (double eps : {0.5, 1.0}) {
    std::vector<oracle::Bits> sep(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) {
      for (std::size_t j = 0; j < cls.size(); ++j) {
        if (i != j && sup(cls[i], cls[j]) > eps) sep[i].set(j);
      }
    }
    const std::size_t greedy = greedy_pack(cls, sup, eps).count;
    const std::size_t best = oracle::max_clique_size(sep);
    pass = pass && greedy == best;
    detail += fmt("m=5 eps %.1f: greedy %zu, maximum %zu; ", eps, greedy, best);
  }
  const double secs = seconds_since(t0);
  detail += fmt("%.1f s", secs);
  return {pass && secs < 60, detail};
}

Outcome dudley() {
  using namespace mswlab::chaining;
  const double single = dudley_integral(CoveringProfile({{1.0, 1}}));
  const double v = dudley_integral(CoveringProfile({{1.0, 1}, {0.5, 2}, {0.25, 4}}));
  const double hand = 0.25 * std::sqrt(std::log(2.0)) + 0.25 * std::sqrt(std::log(4.0));
  const double doubled = dudley_integral(CoveringProfile({{2.0, 1}, {1.0, 2}, {0.5, 4}}));
  const double err = std::max({std::abs(single), std::abs(v - hand), std::abs(doubled - 2 * v)});
  return {err <= 1e-12, fmt("max error %.3g (value %.15f, doubled %.15f)", err, v, doubled)};
}

std::string run_json(const RateExperimentConfig& c, int threads) {
  omp_set_num_threads(threads);
  return report_json(run_experiment(c));
}

Outcome determinism() {
  const int saved = omp_get_max_threads();
  int mismatches = 0, runs = 0;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(std::filesystem::path(MSWLAB_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() == ".cfg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto c = load_config(f);
    const std::string ref = run_json(c, 1);
    for (int threads : {1, 8, 8}) {
      if (run_json(c, threads) != ref) ++mismatches;
    }
    runs += 4;
  }
  omp_set_num_threads(saved);
  return {mismatches == 0 && !files.empty(),
          fmt("%zu configs, %d runs at 1 and 8 threads, %d differing reports", files.size(), runs, mismatches)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1d transport matches LP oracle", ot_oracle},
      {"certified max-sliced solver", certified_solver},
      {"dirac identity W21(mu, delta0) = ||Sigma||^1/2", dirac_identity},
      {"squared W21 below lifted W11", lift_inequality},
      {"EW11 lower bound", lower_bound_w11},
      {"EW11 rate shape, scaled_basis(8)", rate_shape},
      {"p = 2 two-point rate and exact means", extremizer_p2},
      {"symmetrized lower bound with 1/16 constant", symmetrized_lower},
      {"symmetrized upper bound shape", symmetrized_upper},
      {"lifted Gaussian sum bound", lifted_gaussian},
      {"covering sandwich and shape", covering},
      {"Dudley integral", dudley},
      {"byte-identical reports across threads", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
