#include "purex/parallel.hpp"

#include <algorithm>
#include <cstdlib>

#include <omp.h>

namespace purex {

int worker_count() {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("PUREX_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) threads = static_cast<int>(std::min<long>(threads, cap));
  }
  return std::max(threads, 1);
}

}  // namespace purex
