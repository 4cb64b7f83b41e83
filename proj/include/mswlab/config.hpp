#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mswlab/measures.hpp"

namespace mswlab::ratelab {

enum class Estimand {
  ew11,                    // E W_{1,1}(mu, empirical)
  ewp1,                    // E W_{p,1}(mu, empirical)
  ew21_sq_symmetrized,     // E W_{2,1}(mu, symmetrized empirical)^2
  e_rademacher_sum_norm,   // E || sum eps_i X_i ||_2
  e_gaussian_sum_norm,     // E || sum g_i X_i ||_2
  e_gaussian_lifted_opnorm,// E || sum g_i X_i X_i^T ||_op
  e_witness_sq,            // E max(covariance witness, binomial witness)^2
};

std::string to_string(Estimand e);
Estimand parse_estimand(const std::string& name);

struct MeasureSpec {
  std::string generator;        // two_point | scaled_basis | diagonal | csv
  std::vector<double> y0;       // two_point
  int d = 0;                    // scaled_basis
  std::vector<double> sigma;    // diagonal: d*d entries, row-major
  std::vector<double> sigma_diag; // diagonal: the d diagonal entries (alternative to sigma)
  std::string path;             // csv
  bool has_weights = false;     // csv
};

enum class SolverKind { grid, pga };

struct SolverSpec {
  SolverKind kind = SolverKind::pga;
  double tol = 1e-3;
  int restarts = 16;
};

struct VerdictSpec {
  bool lower_bound_w11 = false;
  std::optional<double> expected_slope;
  double slope_tolerance = 0.1;
  bool constant_trend = false;
  bool symmetrized_upper = false;
  bool symmetrized_lower = false;
  bool lifted_gaussian = false;
  double c_cap = 50.0;
};

struct RateExperimentConfig {
  int version = 1;
  std::string name = "experiment";
  MeasureSpec measure;
  Estimand estimand = Estimand::ew11;
  double p = 1.0;
  std::vector<long long> n_grid;
  int trials = 0;
  SolverSpec solver;
  std::uint64_t base_seed = 0;
  VerdictSpec verdicts;

  /// Checks the invariants that do not need the measure built.
  void validate() const;
};

/// Parses the flat INI-style config (sections, key = value, ';' comments).
/// Unknown sections or keys are rejected with all offenders listed.
RateExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
RateExperimentConfig load_config(const std::filesystem::path& path);

/// The config re-serialised in the same format, keys in fixed order.
std::string canonical_config(const RateExperimentConfig& config);

/// Materialised measure plus the facts verdicts need about it.
struct ExperimentMeasure {
  DiscreteMeasure mu;
  std::optional<DiagonalConstruction> diagonal;
  CovarianceSummary summary;
};

ExperimentMeasure build_measure(const MeasureSpec& spec);

/// Parses "1, 2.5, -3" into numbers.
std::vector<double> parse_number_list(const std::string& text);

/// d*d numbers as a row-major square matrix (full) or d numbers as a diagonal.
Matrix sigma_from_list(const std::vector<double>& values, bool full);

}  // namespace mswlab::ratelab
