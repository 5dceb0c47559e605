#include "splinemom/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace splinemom {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("SPLINE_MOM_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) hw = std::min(hw, cap);
    }
    return hw;
}

void parallel_chunks(std::size_t n,
                     const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    int workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        fn(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t base = n / workers;
    std::size_t rem = n % workers;
    std::size_t begin = 0;
    for (int w = 0; w < workers; ++w) {
        std::size_t len = base + (static_cast<std::size_t>(w) < rem ? 1 : 0);
        std::size_t end = begin + len;
        pool.emplace_back(fn, w, begin, end);
        begin = end;
    }
    for (auto& t : pool) t.join();
}

} // namespace splinemom
