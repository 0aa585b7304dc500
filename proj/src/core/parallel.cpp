#include "core/parallel.hpp"

#include <atomic>
#include <mutex>

namespace g2sf {

namespace {
std::atomic<int> g_workers{0};  // 0 = uninitialized

int env_default() {
    if (const char* s = std::getenv("G2SF_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}
}  // namespace

int worker_count() {
    int v = g_workers.load(std::memory_order_relaxed);
    if (v == 0) {
        v = env_default();
        g_workers.store(v, std::memory_order_relaxed);
    }
    return v;
}

void set_worker_count(int n) { g_workers.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

namespace detail {

void run_chunked(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const int workers = std::min<int>(worker_count(), static_cast<int>(chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        try {
            for (;;) {
                std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= chunks) return;
                body(c, c * kChunk, std::min(n, (c + 1) * kChunk));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(chunks, std::memory_order_relaxed);  // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int t = 0; t < workers - 1; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

}  // namespace g2sf
