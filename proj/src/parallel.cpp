#include "propmc/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace propmc {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const int workers = resolve_threads(threads);
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    // Chunked work stealing: 64 indices per grab keeps counter traffic low
    // while still balancing uneven per-index cost.
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = ~std::size_t{0};
    std::exception_ptr err;

    auto worker = [&]() {
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) return;
            const std::size_t end = std::min(begin + kChunk, n);
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (i < err_index) {
                        err_index = i;
                        err = std::current_exception();
                    }
                }
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace propmc
