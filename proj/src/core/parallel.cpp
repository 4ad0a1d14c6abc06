#include "core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace vcnn {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) {
    g_threads.store(std::max(1, n));
}

int threads() {
    return g_threads.load();
}

void parallel_for(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
    if (n <= 0) return;
    int workers = static_cast<int>(std::min<int64_t>(threads(), n));
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    int64_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) {
        int64_t begin = w * chunk;
        int64_t end = std::min<int64_t>(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    fn(0, std::min<int64_t>(n, chunk));
    for (auto& t : pool) t.join();
}

}  // namespace vcnn
