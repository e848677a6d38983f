#include "pulsegrid/threads.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pulsegrid {

int init_threads_from_env() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("PULSEGRID_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (...) {
      // unparsable cap: keep the runtime default
    }
  }
  omp_set_num_threads(n);
  return n;
#else
  return 1;
#endif
}

int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace pulsegrid
