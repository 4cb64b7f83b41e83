#include <gtest/gtest.h>

#include <omp.h>

#include "mswlab/error.hpp"
#include "mswlab/ratelab.hpp"
#include "mswlab/report.hpp"
#include "mswlab/symlift.hpp"
#include "oracles.hpp"

using namespace mswlab;
using namespace mswlab::ratelab;

namespace {

RateExperimentConfig two_point_config(std::vector<long long> grid, int trials) {
  RateExperimentConfig c;
  c.name = "tp";
  c.measure.generator = "two_point";
  c.measure.y0 = {1, 0};
  c.estimand = Estimand::ew11;
  c.n_grid = std::move(grid);
  c.trials = trials;
  c.solver.kind = SolverKind::grid;
  c.solver.tol = 1e-6;
  c.base_seed = 2024;
  return c;
}

}  // namespace

TEST(PairwiseSum, MatchesPlainSumOnIntegers) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  EXPECT_EQ(pairwise_sum(v), 999.0 * 1000 / 2);
  EXPECT_EQ(pairwise_sum(std::vector<double>{}), 0.0);
}

TEST(Estimate, TwoPointMatchesBinomialOracle) {
  const auto report = estimate(two_point_config({4, 8, 12}, 600));
  for (const auto& row : report.rows) {
    const double exact = oracle::two_point_expectation(static_cast<int>(row.n), 1.0);
    EXPECT_NEAR(row.mean, exact, 3 * row.std_error) << "n " << row.n;
  }
  EXPECT_NEAR(oracle::two_point_expectation(4, 1.0), 0.375, 1e-15);
}

TEST(Estimate, TrialValuesAreExact) {
  // Every trial of the grid solver recovers 2|S/n - 1/2| to within its tolerance.
  const auto c = two_point_config({6}, 2);
  const auto m = build_measure(c.measure);
  for (int t = 0; t < 30; ++t) {
    const double v = evaluate_trial(m, c, 6, t);
    const double k = std::round((v / 2 + 0.5) * 6);
    EXPECT_NEAR(v, 2 * std::abs(k / 6 - 0.5), 1e-6);
  }
}

TEST(Estimate, RademacherSingleAtom) {
  RateExperimentConfig c;
  c.measure.generator = "csv";
  c.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/unit_atom.csv";
  c.estimand = Estimand::e_rademacher_sum_norm;
  c.n_grid = {2};
  c.trials = 4000;
  const auto r = estimate(c);
  EXPECT_NEAR(r.rows[0].mean, 1.0, 3 * r.rows[0].std_error);
}

TEST(Estimate, SerialEqualsParallelAcrossThreadCounts) {
  auto c = two_point_config({4, 16}, 40);
  c.solver.kind = SolverKind::pga;
  c.solver.restarts = 3;
  const std::string serial = report_json(estimate(c, Execution::serial));
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3, 8}) {
    omp_set_num_threads(threads);
    EXPECT_EQ(report_json(estimate(c, Execution::parallel)), serial) << threads << " threads";
  }
  omp_set_num_threads(saved);
}

TEST(Estimate, EstimandMeasureMismatch) {
  RateExperimentConfig c;
  c.measure.generator = "csv";
  c.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/pair_nu.csv";
  c.estimand = Estimand::ew21_sq_symmetrized;
  c.n_grid = {4};
  c.trials = 2;
  EXPECT_THROW(estimate(c), ValidationError);

  auto g = two_point_config({4}, 2);
  g.measure.generator = "scaled_basis";
  g.measure.d = 4;
  EXPECT_THROW(estimate(g), ValidationError);  // grid solver in d = 4
}

TEST(Estimate, SlopeOfConstantEstimandIsAnError) {
  RateExperimentConfig c;
  c.measure.generator = "csv";
  c.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/unit_atom.csv";
  c.estimand = Estimand::ew11;
  c.n_grid = {2, 4, 8, 16};
  c.trials = 3;
  const auto r = estimate(c);
  for (const auto& row : r.rows) EXPECT_EQ(row.mean, 0.0);
  EXPECT_TRUE(std::isnan(r.slope));
  EXPECT_THROW(verdict_rate_slope(r, -0.5, 0.1), ExperimentError);
}

TEST(Verdicts, LowerBoundExamples) {
  auto report = estimate(two_point_config({4, 16, 64}, 200));
  const auto m = build_measure(report.config.measure);
  EXPECT_NEAR(lower_bound_w11_rhs(m.mu, 4), 1 / (2 * std::sqrt(8.0)), 1e-15);
  const auto v = verdict_lower_bound_w11(report, m.mu);
  EXPECT_TRUE(v.pass);
  for (const auto& row : report.rows) EXPECT_EQ(row.verdict, "PASS");

  // Degenerate: single atom at the origin, both sides 0.
  RateExperimentConfig z;
  z.measure.generator = "csv";
  z.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/origin.csv";
  z.estimand = Estimand::ew11;
  z.n_grid = {4, 8};
  z.trials = 2;
  auto zr = estimate(z);
  EXPECT_TRUE(verdict_lower_bound_w11(zr, build_measure(z.measure).mu).pass);

  // Non-centred measure is rejected.
  RateExperimentConfig nc = z;
  nc.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/unit_atom.csv";
  auto nr = estimate(nc);
  EXPECT_THROW(verdict_lower_bound_w11(nr, build_measure(nc.measure).mu), ValidationError);
}

TEST(Verdicts, LowerBoundScaledBasis) {
  RateExperimentConfig c;
  c.measure.generator = "scaled_basis";
  c.measure.d = 4;
  c.estimand = Estimand::ew11;
  c.n_grid = {4, 16, 64};
  c.trials = 100;
  c.solver.restarts = 8;
  c.verdicts.lower_bound_w11 = true;
  EXPECT_TRUE(run_experiment(c).all_pass());
}

TEST(Verdicts, RateSlopeNeedsFourPoints) {
  const auto r = estimate(two_point_config({4, 16, 64}, 20));
  EXPECT_THROW(verdict_rate_slope(r, -0.5, 0.1), ValidationError);
}

TEST(Verdicts, SymmetrizedLowerArithmetic) {
  const auto m = build_measure(MeasureSpec{"diagonal", {}, 0, {}, {0.25, 0.25, 0.25, 0.25}, "", false});
  EXPECT_NEAR(symmetrized_lower_rhs(m.summary, 4), 1.0 / 32.0, 1e-15);
  const auto s = build_measure(MeasureSpec{"scaled_basis", {}, 4, {}, {}, "", false});
  const double q = 4 * std::log(8.0) / 8;
  EXPECT_NEAR(symmetrized_upper_shape(s.summary, 8), q + std::sqrt(q), 1e-14);
}

TEST(Verdicts, WitnessSquaredExactAtSmallN) {
  // E[witness^2] at n = 2 and n = 4 by enumerating all ordered samples.
  const auto m = build_measure(MeasureSpec{"diagonal", {}, 0, {}, {0.25, 0.25, 0.25, 0.25}, "", false});
  const auto& mu = m.mu;
  for (int n : {2, 4}) {
    const std::size_t k = mu.size();
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= k;
    double e = 0.0;
    PointMatrix x(mu.dim(), n);
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      double prob = 1.0;
      for (int i = 0; i < n; ++i) {
        x.col(i) = mu.point(c % k);
        prob *= mu.weight(c % k);
        c /= k;
      }
      const double w = std::max(witness_covariance(x, m.summary.op_norm), witness_binomial(x, *m.diagonal));
      e += prob * w * w;
    }
    EXPECT_GE(e, symmetrized_lower_rhs(m.summary, n)) << "n " << n;

    RateExperimentConfig c;
    c.measure = MeasureSpec{"diagonal", {}, 0, {}, {0.25, 0.25, 0.25, 0.25}, "", false};
    c.estimand = Estimand::e_witness_sq;
    c.n_grid = {n};
    c.trials = 2000;
    const auto r = estimate(c);
    EXPECT_NEAR(r.rows[0].mean, e, 3.5 * r.rows[0].std_error) << "n " << n;
  }
}

TEST(Verdicts, SymmetrizedRequiresSymmetry) {
  RateExperimentConfig c;
  c.measure.generator = "csv";
  c.measure.path = std::string(MSWLAB_SOURCE_DIR) + "/tests/fixtures/unit_atom.csv";
  c.estimand = Estimand::e_gaussian_sum_norm;
  c.n_grid = {2, 4};
  c.trials = 3;
  auto r = estimate(c);
  const auto m = build_measure(c.measure);
  EXPECT_THROW(verdict_symmetrized_lower(r, m), ValidationError);
  EXPECT_THROW(verdict_symmetrized_upper(r, m, 50), ValidationError);
}

TEST(Verdicts, LiftedGaussian) {
  RateExperimentConfig c;
  c.measure.generator = "scaled_basis";
  c.measure.d = 4;
  c.estimand = Estimand::e_gaussian_lifted_opnorm;
  c.n_grid = {8, 32};
  c.trials = 50;
  c.verdicts.lifted_gaussian = true;
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.all_pass());
  EXPECT_GT(r.rows[0].mean, 0.0);
}
