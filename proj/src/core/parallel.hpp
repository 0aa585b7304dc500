#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <utility>
#include <vector>

namespace g2sf {

// Worker-count control. Default comes from the G2SF_THREADS environment
// variable, else hardware concurrency. Results of every reduction in this
// project are bitwise independent of the worker count: work is split into
// chunks of a fixed size and per-chunk partials are combined sequentially in
// chunk order.
int worker_count();
void set_worker_count(int n);

namespace detail {
inline constexpr std::size_t kChunk = 4096;

void run_chunked(std::size_t n, const std::function<void(std::size_t, std::size_t, std::size_t)>& body);
}  // namespace detail

// f(i) for i in [0, n), parallel over fixed-size chunks.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    detail::run_chunked(n, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) f(i);
    });
}

struct MaxLoc {
    double value = 0.0;
    std::size_t index = 0;
    bool seen = false;
};

// max over i of f(i) >= 0, with the first index attaining the max.
template <typename F>
MaxLoc parallel_max(std::size_t n, F&& f) {
    const std::size_t chunks = n == 0 ? 0 : (n + detail::kChunk - 1) / detail::kChunk;
    std::vector<MaxLoc> partial(chunks);
    detail::run_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        MaxLoc m;
        for (std::size_t i = begin; i < end; ++i) {
            double v = f(i);
            if (!m.seen || v > m.value) {
                m.value = v;
                m.index = i;
                m.seen = true;
            }
        }
        partial[chunk] = m;
    });
    MaxLoc out;
    for (const MaxLoc& m : partial) {
        if (!m.seen) continue;
        if (!out.seen || m.value > out.value) out = m;
    }
    return out;
}

// first index i in [0, n) with pred(i) true, scanned deterministically.
template <typename P>
std::pair<bool, std::size_t> parallel_find_first(std::size_t n, P&& pred) {
    const std::size_t chunks = n == 0 ? 0 : (n + detail::kChunk - 1) / detail::kChunk;
    constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> partial(chunks, kNone);
    detail::run_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            if (pred(i)) {
                partial[chunk] = i;
                return;
            }
    });
    for (std::size_t v : partial)
        if (v != kNone) return {true, v};
    return {false, 0};
}

// sum over i of f(i), combined in fixed chunk order.
template <typename F>
double parallel_sum(std::size_t n, F&& f) {
    const std::size_t chunks = n == 0 ? 0 : (n + detail::kChunk - 1) / detail::kChunk;
    std::vector<double> partial(chunks, 0.0);
    detail::run_chunked(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += f(i);
        partial[chunk] = acc;
    });
    double acc = 0.0;
    for (double v : partial) acc += v;
    return acc;
}

}  // namespace g2sf
