#include "chargeplan/core/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chargeplan {

namespace {
int g_jobs = 1;
}

void set_worker_count(int jobs) {
    g_jobs = std::max(1, jobs);
}

int worker_count() { return g_jobs; }

int hardware_worker_default() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : (int)n;
}

void serial_for(int n, const std::function<void(int)>& fn) {
    for (int i = 0; i < n; ++i) fn(i);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
#ifdef _OPENMP
    if (g_jobs > 1 && n > 1) {
        std::exception_ptr error;
#pragma omp parallel for schedule(dynamic) num_threads(g_jobs)
        for (int i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
#pragma omp critical
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
        return;
    }
#endif
    serial_for(n, fn);
}

}  // namespace chargeplan
