#pragma once

namespace purex {

/// Thread count for parallel kernels: omp_get_max_threads(), capped by the
/// PUREX_THREADS environment variable when it holds a positive integer.
int worker_count();

}  // namespace purex
