#pragma once

#include <atomic>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace stalker {

// Run fn(i) for i in [0, count) on `threads` workers pulling indices from a
// shared ticket.  Results must be written to per-index slots by the caller;
// with that convention the output is identical for any thread count.
inline void parallel_for(std::size_t count, int threads,
                         const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> ticket{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = ticket.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int n = threads < static_cast<int>(count) ? threads : static_cast<int>(count);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// Shortest round-trippable decimal for CSV output.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

}  // namespace stalker
