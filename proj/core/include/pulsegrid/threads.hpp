#pragma once

namespace pulsegrid {

// Applies the PULSEGRID_THREADS cap to the OpenMP runtime (no-op when built
// without OpenMP). Returns the effective worker count.
int init_threads_from_env();

int worker_count();

}  // namespace pulsegrid
