#include "ctdn/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

namespace ctdn {

namespace {
int g_threads = 1;
}

int num_threads() { return g_threads; }

void set_num_threads(int n) {
    if (n < 1) throw std::invalid_argument("set_num_threads: need n >= 1");
    g_threads = n;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& fn) {
    if (n <= 0) return;
    const int t = std::min<std::int64_t>(g_threads, n);
    if (t == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(t);
    const std::int64_t chunk = (n + t - 1) / t;
    for (int w = 0; w < t; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : workers) th.join();
}

} // namespace ctdn
