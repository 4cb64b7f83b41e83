#include "mswlab/ratelab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mswlab/error.hpp"
#include "mswlab/rng.hpp"
#include "mswlab/sliced.hpp"
#include "mswlab/symlift.hpp"

namespace mswlab::ratelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxFailureFraction = 0.05;
constexpr double kCenteredTol = 1e-10;

double solve_sliced(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p, const SolverSpec& solver,
                    std::uint64_t seed) {
  if (solver.kind == SolverKind::grid) return max_sliced_grid(mu, nu, p, solver.tol, Execution::serial).value;
  PgaOptions options;
  options.restarts = solver.restarts;
  options.seed = seed;
  options.exec = Execution::serial;
  return max_sliced_pga(mu, nu, p, options).value;
}

void check_compatible(const RateExperimentConfig& config, const ExperimentMeasure& measure) {
  const bool uses_solver = config.estimand == Estimand::ew11 || config.estimand == Estimand::ewp1 ||
                           config.estimand == Estimand::ew21_sq_symmetrized;
  if (uses_solver && config.solver.kind == SolverKind::grid && measure.mu.dim() > 3) {
    throw ValidationError("grid solver requires dimension <= 3 (measure has dimension " +
                          std::to_string(measure.mu.dim()) + ")");
  }
  if (config.estimand == Estimand::ew21_sq_symmetrized && !measure.mu.is_symmetric()) {
    throw ValidationError("EW21_sq_symmetrized requires a symmetric measure");
  }
}

// (mean - rhs) / SE, with the SE = 0 case decided by the sign alone.
double margin(double mean, double rhs, double se) {
  const double diff = mean - rhs;
  if (se > 0.0) return diff / se;
  return diff >= 0.0 ? kInf : -kInf;
}

}  // namespace

bool RateReport::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::uint64_t trial_seed(std::uint64_t base_seed, long long n, int trial) {
  return derive_seed(base_seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(trial));
}

double evaluate_trial(const ExperimentMeasure& measure, const RateExperimentConfig& config, long long n, int trial) {
  const std::uint64_t seed = trial_seed(config.base_seed, n, trial);
  const PointMatrix x = sample(measure.mu, static_cast<std::size_t>(n), derive_seed(seed, 0));
  const std::uint64_t solver_seed = derive_seed(seed, 1);

  switch (config.estimand) {
    case Estimand::ew11:
      return solve_sliced(measure.mu, empirical(x), 1.0, config.solver, solver_seed);
    case Estimand::ewp1:
      return solve_sliced(measure.mu, empirical(x), config.p, config.solver, solver_seed);
    case Estimand::ew21_sq_symmetrized: {
      const double w = solve_sliced(measure.mu, symmetrize_empirical(x), 2.0, config.solver, solver_seed);
      return w * w;
    }
    case Estimand::e_rademacher_sum_norm:
    case Estimand::e_gaussian_sum_norm: {
      Rng rng(derive_seed(seed, 2));
      const bool gaussian = config.estimand == Estimand::e_gaussian_sum_norm;
      Vector sum = Vector::Zero(x.rows());
      for (Eigen::Index i = 0; i < x.cols(); ++i) sum += (gaussian ? rng.normal() : rng.rademacher()) * x.col(i);
      return sum.norm();
    }
    case Estimand::e_gaussian_lifted_opnorm: {
      Rng rng(derive_seed(seed, 2));
      Matrix sum = Matrix::Zero(x.rows(), x.rows());
      for (Eigen::Index i = 0; i < x.cols(); ++i) sum.noalias() += rng.normal() * x.col(i) * x.col(i).transpose();
      return symmetric_op_norm(sum);
    }
    case Estimand::e_witness_sq: {
      double w = witness_covariance(x, measure.summary.op_norm);
      if (measure.diagonal) w = std::max(w, witness_binomial(x, *measure.diagonal));
      return w * w;
    }
  }
  throw ValidationError("unknown estimand");
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

SlopeFit fit_loglog(const std::vector<RateRow>& rows) {
  if (rows.size() < 2) throw ValidationError("slope fit needs at least 2 grid points");
  const auto k = static_cast<double>(rows.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& r : rows) {
    if (!(r.mean > 0.0)) {
      throw ExperimentError("mean at n = " + std::to_string(r.n) + " is not positive; log-log slope undefined");
    }
    sx += std::log(static_cast<double>(r.n));
    sy += std::log(r.mean);
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& r : rows) {
    const double dx = std::log(static_cast<double>(r.n)) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(r.mean) - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& r : rows) {
    const double e = std::log(r.mean) - (fit.intercept + fit.slope * std::log(static_cast<double>(r.n)));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / k);
  return fit;
}

RateReport estimate(const RateExperimentConfig& config, const ExperimentMeasure& measure, Execution exec) {
  config.validate();
  check_compatible(config, measure);

  const std::size_t grid = config.n_grid.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  const std::size_t tasks = grid * trials;
  std::vector<double> values(tasks, kNaN);

  auto run = [&](std::size_t task) {
    const std::size_t g = task / trials;
    const int t = static_cast<int>(task % trials);
    try {
      values[task] = evaluate_trial(measure, config, config.n_grid[g], t);
    } catch (const std::exception&) {
      values[task] = kNaN;
    }
  };

  if (exec == Execution::parallel) {
    const auto count = static_cast<long long>(tasks);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long task = 0; task < count; ++task) run(static_cast<std::size_t>(task));
  } else {
    for (std::size_t task = 0; task < tasks; ++task) run(task);
  }

  RateReport report;
  report.config = config;
  for (std::size_t g = 0; g < grid; ++g) {
    std::vector<double> ok;
    ok.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
      const double v = values[g * trials + t];
      if (std::isfinite(v)) ok.push_back(v);
    }
    RateRow row;
    row.n = config.n_grid[g];
    row.trials = static_cast<int>(ok.size());
    row.failed = static_cast<int>(trials - ok.size());
    row.bound_rhs = kNaN;
    report.failed_trials += row.failed;
    if (ok.size() < 2) {
      throw ExperimentError("fewer than 2 successful trials at n = " + std::to_string(row.n));
    }
    std::sort(ok.begin(), ok.end());
    const auto k = static_cast<double>(ok.size());
    row.mean = pairwise_sum(ok) / k;
    std::vector<double> sq(ok.size());
    for (std::size_t i = 0; i < ok.size(); ++i) sq[i] = (ok[i] - row.mean) * (ok[i] - row.mean);
    row.std_error = std::sqrt(pairwise_sum(sq) / (k - 1.0)) / std::sqrt(k);
    report.rows.push_back(row);
  }
  if (static_cast<double>(report.failed_trials) > kMaxFailureFraction * static_cast<double>(tasks)) {
    throw ExperimentError(std::to_string(report.failed_trials) + " of " + std::to_string(tasks) +
                          " trials failed (more than 5%)");
  }

  const bool positive =
      std::all_of(report.rows.begin(), report.rows.end(), [](const RateRow& r) { return r.mean > 0.0; });
  if (positive && report.rows.size() >= 2) {
    const SlopeFit fit = fit_loglog(report.rows);
    report.slope = fit.slope;
    report.slope_residual = fit.residual;
  } else {
    report.slope = kNaN;
    report.slope_residual = kNaN;
  }
  return report;
}

RateReport estimate(const RateExperimentConfig& config, Execution exec) {
  config.validate();
  return estimate(config, build_measure(config.measure), exec);
}

double lower_bound_w11_rhs(const DiscreteMeasure& mu, long long n) {
  double first_moment = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) first_moment += mu.weight(i) * mu.point(i).norm();
  return first_moment / (2.0 * std::sqrt(2.0 * static_cast<double>(n)));
}

double symmetrized_upper_shape(const CovarianceSummary& s, long long n) {
  const double q = s.radius * s.radius * std::log(static_cast<double>(n)) / (static_cast<double>(n) * s.op_norm);
  return s.op_norm * (q + std::sqrt(q));
}

double symmetrized_lower_rhs(const CovarianceSummary& s, long long n) {
  const double q = s.trace / (static_cast<double>(n) * s.op_norm);
  return s.op_norm * (q + std::sqrt(q)) / 16.0;
}

double lifted_gaussian_shape(const CovarianceSummary& s, long long n) {
  const auto nn = static_cast<double>(n);
  const double ln = std::log(nn);
  return s.radius * std::sqrt(nn * ln) * std::sqrt(s.op_norm) + s.radius * s.radius * ln;
}

Verdict verdict_lower_bound_w11(RateReport& report, const DiscreteMeasure& mu) {
  if (report.config.estimand != Estimand::ew11) throw ValidationError("lower_bound_w11 verdict requires estimand EW11");
  if (mu.mean().lpNorm<Eigen::Infinity>() > kCenteredTol) {
    throw ValidationError("lower_bound_w11 verdict requires a centered measure");
  }
  Verdict v;
  v.name = "lower_bound_w11";
  v.bound = "E W11(mu, empirical) >= int ||x|| dmu / (2 sqrt(2n))";
  v.pass = true;
  v.margin_in_ses = kInf;
  for (auto& row : report.rows) {
    row.bound_rhs = lower_bound_w11_rhs(mu, row.n);
    const double m = margin(row.mean, row.bound_rhs, row.std_error);
    const bool ok = m >= -3.0;
    row.verdict = ok ? "PASS" : "FAIL";
    v.pass = v.pass && ok;
    if (m < v.margin_in_ses || (&row == &report.rows.front())) {
      v.margin_in_ses = m;
      v.lhs = row.mean;
      v.rhs = row.bound_rhs;
      v.detail = "tightest at n = " + std::to_string(row.n) + "; pass iff mean + 3 SE >= rhs at every n";
    }
  }
  return v;
}

Verdict verdict_rate_slope(const RateReport& report, double expected_slope, double tolerance) {
  if (report.rows.size() < 4) throw ValidationError("rate slope verdict needs at least 4 grid points");
  const SlopeFit fit = fit_loglog(report.rows);
  Verdict v;
  v.name = "rate_slope";
  v.bound = "fitted log-log slope within expected +- tolerance";
  v.lhs = fit.slope;
  v.rhs = expected_slope;
  v.margin_in_ses = kNaN;
  v.pass = std::abs(fit.slope - expected_slope) <= tolerance;
  v.detail = "tolerance " + std::to_string(tolerance) + ", fit residual " + std::to_string(fit.residual);
  return v;
}

Verdict verdict_constant_trend(const RateReport& report, double expected_slope) {
  if (report.rows.size() < 2) throw ValidationError("constant trend verdict needs at least 2 grid points");
  Verdict v;
  v.name = "constant_trend";
  v.bound = "n^(-slope) * mean does not grow across the grid (3 SE)";
  v.pass = true;
  v.margin_in_ses = kInf;
  double c_max = 0.0;
  for (std::size_t k = 0; k + 1 < report.rows.size(); ++k) {
    const auto& a = report.rows[k];
    const auto& b = report.rows[k + 1];
    const double sa = std::pow(static_cast<double>(a.n), -expected_slope);
    const double sb = std::pow(static_cast<double>(b.n), -expected_slope);
    const double ca = sa * a.mean, cb = sb * b.mean;
    const double se = std::hypot(sa * a.std_error, sb * b.std_error);
    const double m = margin(ca, cb, se);
    v.pass = v.pass && m >= -3.0;
    v.margin_in_ses = std::min(v.margin_in_ses, m);
    c_max = std::max({c_max, ca, cb});
  }
  v.lhs = report.rows.back().mean * std::pow(static_cast<double>(report.rows.back().n), -expected_slope);
  v.rhs = report.rows.front().mean * std::pow(static_cast<double>(report.rows.front().n), -expected_slope);
  v.detail = "largest scaled mean " + std::to_string(c_max);
  return v;
}

Verdict verdict_symmetrized_upper(RateReport& report, const ExperimentMeasure& measure, double c_cap) {
  if (!measure.mu.is_symmetric()) throw ValidationError("symmetrized bounds require a symmetric measure");
  if (!(measure.summary.op_norm > 0.0)) throw ValidationError("symmetrized bounds require a nonzero second moment");
  for (const auto& row : report.rows) {
    if (row.n < 2) throw ValidationError("symmetrized upper bound needs n >= 2");
  }
  Verdict v;
  v.name = "symmetrized_upper";
  v.bound = "E W21(mu, symmetrized empirical)^2 <= C* shape(n), C* <= cap, ratio not trending up";
  double c_star = 0.0;
  for (auto& row : report.rows) {
    const double shape = symmetrized_upper_shape(measure.summary, row.n);
    row.bound_rhs = c_cap * shape;
    row.verdict = row.mean <= row.bound_rhs ? "PASS" : "FAIL";
    c_star = std::max(c_star, row.mean / shape);
  }
  const double first = report.rows.front().mean / symmetrized_upper_shape(measure.summary, report.rows.front().n);
  const double last = report.rows.back().mean / symmetrized_upper_shape(measure.summary, report.rows.back().n);
  v.lhs = c_star;
  v.rhs = c_cap;
  v.margin_in_ses = kNaN;
  v.pass = c_star <= c_cap && last <= 2.0 * first;
  v.detail = "first ratio " + std::to_string(first) + ", last ratio " + std::to_string(last);
  return v;
}

Verdict verdict_symmetrized_lower(RateReport& report, const ExperimentMeasure& measure) {
  if (!measure.mu.is_symmetric()) throw ValidationError("symmetrized bounds require a symmetric measure");
  if (!(measure.summary.op_norm > 0.0)) throw ValidationError("symmetrized bounds require a nonzero second moment");
  Verdict v;
  v.name = "symmetrized_lower";
  v.bound = "E W21(mu, symmetrized empirical)^2 >= (1/16) ||S|| (T/(n ||S||) + sqrt(T/(n ||S||)))";
  v.pass = true;
  v.margin_in_ses = kInf;
  for (auto& row : report.rows) {
    row.bound_rhs = symmetrized_lower_rhs(measure.summary, row.n);
    const double m = margin(row.mean, row.bound_rhs, row.std_error);
    const bool ok = m >= -3.0;
    row.verdict = ok ? "PASS" : "FAIL";
    v.pass = v.pass && ok;
    if (m < v.margin_in_ses || (&row == &report.rows.front())) {
      v.margin_in_ses = m;
      v.lhs = row.mean;
      v.rhs = row.bound_rhs;
      v.detail = "tightest at n = " + std::to_string(row.n) + "; pass iff mean + 3 SE >= rhs at every n";
    }
  }
  return v;
}

Verdict verdict_lifted_gaussian(RateReport& report, const ExperimentMeasure& measure, double c_cap) {
  for (const auto& row : report.rows) {
    if (row.n < 2) throw ValidationError("lifted Gaussian bound needs n >= 2");
  }
  Verdict v;
  v.name = "lifted_gaussian";
  v.bound = "E ||sum g_i X_i X_i^T||_op <= cap (r sqrt(n ln n) ||S||^(1/2) + r^2 ln n)";
  v.pass = true;
  double worst = 0.0;
  for (auto& row : report.rows) {
    row.bound_rhs = c_cap * lifted_gaussian_shape(measure.summary, row.n);
    const bool ok = row.mean <= row.bound_rhs;
    row.verdict = ok ? "PASS" : "FAIL";
    v.pass = v.pass && ok;
    const double ratio = row.mean / lifted_gaussian_shape(measure.summary, row.n);
    if (ratio >= worst) {
      worst = ratio;
      v.lhs = row.mean;
      v.rhs = row.bound_rhs;
    }
  }
  v.margin_in_ses = kNaN;
  v.detail = "largest fitted constant " + std::to_string(worst);
  return v;
}

RateReport run_experiment(const RateExperimentConfig& config, Execution exec) {
  config.validate();
  const ExperimentMeasure measure = build_measure(config.measure);
  RateReport report = estimate(config, measure, exec);
  const auto& vs = config.verdicts;
  if (vs.lower_bound_w11) report.verdicts.push_back(verdict_lower_bound_w11(report, measure.mu));
  if (vs.expected_slope) {
    report.verdicts.push_back(verdict_rate_slope(report, *vs.expected_slope, vs.slope_tolerance));
  }
  if (vs.constant_trend) report.verdicts.push_back(verdict_constant_trend(report, vs.expected_slope.value_or(-0.5)));
  if (vs.symmetrized_upper) report.verdicts.push_back(verdict_symmetrized_upper(report, measure, vs.c_cap));
  if (vs.symmetrized_lower) report.verdicts.push_back(verdict_symmetrized_lower(report, measure));
  if (vs.lifted_gaussian) report.verdicts.push_back(verdict_lifted_gaussian(report, measure, vs.c_cap));
  return report;
}

}  // namespace mswlab::ratelab
