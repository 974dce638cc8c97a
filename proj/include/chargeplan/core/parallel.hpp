#pragma once

#include <functional>

namespace chargeplan {

// Worker count used by the OpenMP fan-out loops. 1 selects the serial
// reference path; results are identical either way because every task
// writes to its own slot and reductions run in index order afterwards.
void set_worker_count(int jobs);
int worker_count();
int hardware_worker_default();

// Runs fn(i) for i in [0, n). Parallel across OpenMP threads when the
// worker count is above one, plain loop otherwise.
void parallel_for(int n, const std::function<void(int)>& fn);

// Serial reference driver, kept separate so tests and the benchmark can
// compare it against the OpenMP path directly.
void serial_for(int n, const std::function<void(int)>& fn);

}  // namespace chargeplan
