#pragma once

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nlh {

inline int resolve_workers(int workers) {
#ifdef _OPENMP
    if (workers <= 0) return omp_get_max_threads();
    return workers;
#else
    (void)workers;
    return 1;
#endif
}

inline int this_thread_index() {
#ifdef _OPENMP
    return omp_get_thread_num();
#else
    return 0;
#endif
}

// Runs compute(i, slot) for i in [0, total) on up to `workers` threads and
// consume(i, slot) on the calling thread in ascending i order. Work is cut
// into chunks so only `chunk` result slots are alive at a time; slot objects
// are reused across chunks, which lets compute() recycle their buffers.
// Because consumption order is fixed, results are independent of the worker
// count (compute must be pure w.r.t. shared state).
template <typename Result, typename Compute, typename Consume>
void parallel_for_ordered(int total, int workers, Compute&& compute, Consume&& consume) {
    const int nw = resolve_workers(workers);
    const int chunk = std::max(1, std::min(total, nw * 4));
    std::vector<Result> slots(chunk);

    for (int base = 0; base < total; base += chunk) {
        const int count = std::min(chunk, total - base);
        if (nw == 1) {
            for (int k = 0; k < count; ++k) compute(base + k, slots[k]);
        } else {
#ifdef _OPENMP
#pragma omp parallel for num_threads(nw) schedule(dynamic)
#endif
            for (int k = 0; k < count; ++k) compute(base + k, slots[k]);
        }
        for (int k = 0; k < count; ++k) consume(base + k, slots[k]);
    }
}

}  // namespace nlh
