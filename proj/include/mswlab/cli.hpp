#pragma once

#include <iosfwd>

namespace mswlab {

/// Exit codes: 0 success, 1 validation error, 2 experiment or verdict
/// failure, 3 I/O error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mswlab
