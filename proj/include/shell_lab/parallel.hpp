#pragma once

#include <functional>

namespace shell_lab {

// worker count: SHELL_LAB_THREADS if set, else hardware concurrency
int thread_count();

// run body(i) for i in [0, n); each index is written by exactly one task, so results
// do not depend on the worker count
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace shell_lab
