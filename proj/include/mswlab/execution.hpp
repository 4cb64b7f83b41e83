#pragma once

namespace mswlab {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce bit-identical results; the serial one exists for testing and
/// benchmarking.
enum class Execution { serial, parallel };

}  // namespace mswlab
