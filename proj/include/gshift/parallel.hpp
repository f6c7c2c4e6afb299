#ifndef GSHIFT_PARALLEL_HPP
#define GSHIFT_PARALLEL_HPP

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gshift {

/// Cap the OpenMP worker pool. n <= 0 leaves the runtime default in place.
/// All parallel kernels in this library produce bitwise-identical results
/// for every worker count: each output cell is a fixed-order reduction and
/// every replica owns its own RNG stream.
inline void set_workers(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

inline int max_workers() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline double wall_time() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

} // namespace gshift

#endif
