#pragma once

#include <cstddef>
#include <functional>

namespace plateflow {

/// Worker count used by parallel_for; 0 or 1 runs inline.
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; callers write
/// results into slots keyed by i, so the output does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace plateflow
