// Thread-count control and a minimal chunked parallel_for. Callers must only
// write disjoint output ranges per index, which keeps results bit-identical
// for any thread count.
#pragma once

#include <cstdint>
#include <functional>

namespace ctdn {

int num_threads();
void set_num_threads(int n);

// Runs fn(i) for i in [0, n). With num_threads() == 1 this is a plain loop.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn);

} // namespace ctdn
