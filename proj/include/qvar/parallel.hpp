#pragma once

// Deterministic parallel sweeps: work is partitioned by index, every task
// writes only its own slot, and reductions happen sequentially in index
// order afterwards. Results are bit-identical for any thread count.

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qvar {

inline int hardware_threads() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

/// Process-wide worker cap, set once by the CLI --threads flag.
inline std::atomic<int>& thread_limit() {
    static std::atomic<int> limit{0};  // 0 = use hardware_threads()
    return limit;
}

inline int effective_threads(int requested = 0) {
    int cap = thread_limit().load();
    int n = requested > 0 ? requested : (cap > 0 ? cap : hardware_threads());
    if (cap > 0 && n > cap) n = cap;
    return n < 1 ? 1 : n;
}

/// body(i) for i in [0, n); striped over worker threads.
template <class F>
void parallel_for(std::size_t n, F&& body, int threads = 0) {
    int nt = effective_threads(threads);
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (static_cast<std::size_t>(nt) > n) nt = static_cast<int>(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt) - 1);
    for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

/// Map i -> f(i), results collected by index; reduce sequentially at the call site.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f, int threads = 0) {
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = f(i); }, threads);
    return out;
}

}  // namespace qvar
