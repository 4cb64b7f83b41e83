#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mswlab/config.hpp"
#include "mswlab/execution.hpp"

namespace mswlab::ratelab {

struct RateRow {
  long long n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;  // successful trials
  int failed = 0;
  double bound_rhs = 0.0;    // NaN when no bound is configured
  std::string verdict = "-"; // PASS / FAIL / -
};

struct Verdict {
  std::string name;   // short id, e.g. "lower_bound_w11"
  std::string bound;  // the inequality being checked, in words
  double lhs = 0.0;
  double rhs = 0.0;
  double margin_in_ses = 0.0;  // (rhs side slack) / SE at the tightest n; NaN if not applicable
  bool pass = false;
  std::string detail;
};

struct RateReport {
  RateExperimentConfig config;
  std::vector<RateRow> rows;
  double slope = 0.0;           // NaN when some mean is nonpositive
  double slope_residual = 0.0;  // root mean square residual of the log-log fit
  int failed_trials = 0;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

/// Seed of trial `trial` at sample size n.
std::uint64_t trial_seed(std::uint64_t base_seed, long long n, int trial);

/// One trial of the configured estimand. Throws on solver failure.
double evaluate_trial(const ExperimentMeasure& measure, const RateExperimentConfig& config, long long n, int trial);

/// Runs every (n, trial) task and aggregates. No verdicts are applied.
/// The result does not depend on `exec` or the thread count.
RateReport estimate(const RateExperimentConfig& config, const ExperimentMeasure& measure,
                    Execution exec = Execution::parallel);
RateReport estimate(const RateExperimentConfig& config, Execution exec = Execution::parallel);

/// Runs estimate and every verdict the config enables.
RateReport run_experiment(const RateExperimentConfig& config, Execution exec = Execution::parallel);

/// Sum in a fixed tree order, independent of how values were produced.
double pairwise_sum(std::span<const double> values);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

/// Least squares of ln(mean) on ln(n). Throws ExperimentError on a
/// nonpositive mean.
SlopeFit fit_loglog(const std::vector<RateRow>& rows);

/// mean + 3 SE >= (1/(2 sqrt(2n))) int ||x|| dmu at every n. mu must be centered.
Verdict verdict_lower_bound_w11(RateReport& report, const DiscreteMeasure& mu);

/// Fitted slope within expected +- tolerance. Needs at least 4 grid points.
Verdict verdict_rate_slope(const RateReport& report, double expected_slope, double tolerance);

/// n^{-exponent'} scaled means do not grow: c_{k+1} <= c_k + 3 sqrt(se_k^2 + se_{k+1}^2)
/// with c = n^{|expected_slope|} mean.
Verdict verdict_constant_trend(const RateReport& report, double expected_slope);

/// UPPER: C* = max mean / shape(n) <= c_cap and last ratio <= 2 x first, with
/// shape(n) = ||S|| (r^2 ln n / (n ||S||) + sqrt(r^2 ln n / (n ||S||))).
Verdict verdict_symmetrized_upper(RateReport& report, const ExperimentMeasure& measure, double c_cap);

/// LOWER: mean + 3 SE >= (1/16) ||S|| (T/(n ||S||) + sqrt(T/(n ||S||))).
Verdict verdict_symmetrized_lower(RateReport& report, const ExperimentMeasure& measure);

/// mean <= c_cap (r sqrt(n ln n) ||S||^{1/2} + r^2 ln n) at every n.
Verdict verdict_lifted_gaussian(RateReport& report, const ExperimentMeasure& measure, double c_cap);

/// Right-hand sides used by the verdicts, exposed for tests and plots.
double lower_bound_w11_rhs(const DiscreteMeasure& mu, long long n);
double symmetrized_upper_shape(const CovarianceSummary& s, long long n);
double symmetrized_lower_rhs(const CovarianceSummary& s, long long n);
double lifted_gaussian_shape(const CovarianceSummary& s, long long n);

}  // namespace mswlab::ratelab
