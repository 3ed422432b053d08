#pragma once

namespace ags {

// Selects between the OpenMP kernels and their serial reference loops.
// Both produce bit-identical results; the serial path exists for tests
// and benchmarks.
enum class Exec { kSerial, kParallel };

}  // namespace ags
