#pragma once

#include <iosfwd>
#include <string>

#include "mswlab/ratelab.hpp"

namespace mswlab::ratelab {

/// FNV-1a 64 of the canonical config text, as "fnv1a64:<16 hex digits>".
std::string config_hash(const RateExperimentConfig& config);

/// JSON report: config echo, seed, hash, per-n rows, slope, verdicts.
/// No timestamps or host data, so equal inputs give equal bytes.
std::string report_json(const RateReport& report);

/// Columns n, mean, std_error, trials, bound_rhs, verdict.
void write_report_csv(std::ostream& out, const RateReport& report);

/// 800 x 600 log-log plot with one polyline per series: the means, the
/// fitted line (when a slope exists) and the bound curve (when configured).
std::string render_svg(const RateReport& report);

}  // namespace mswlab::ratelab
