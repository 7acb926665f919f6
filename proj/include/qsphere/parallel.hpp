#pragma once

#include <cstddef>
#include <functional>

namespace qsphere {

/// Worker count: QSPHERE_THREADS when set (integer >= 1), otherwise the
/// hardware concurrency capped at 8. An explicit override wins over both.
std::size_t thread_count();
void set_thread_count(std::size_t n);  // 0 restores the default

/// Runs body(i) for i in [0, n) on a static partition. Callers write results
/// into slot i so that output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qsphere
