#pragma once

#include <cstddef>
#include <functional>

namespace csas {

/// Worker count: CSAS_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is visited exactly once; callers write to disjoint outputs per index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace csas
