#pragma once

#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace rti {

// Worker count: RTI_THREADS when set (clamped to [1, 64]), else the hardware.
inline int thread_budget() {
    if (const char* env = std::getenv("RTI_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<int>(v > 64 ? 64 : v);
        return 1;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) on up to thread_budget() threads. Indices are
// dealt in contiguous blocks and every slot is written by exactly one thread,
// so results land deterministically regardless of scheduling. The earliest
// failing index wins when exceptions occur.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
    int workers = thread_budget();
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    if (workers > n) workers = n;

    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    std::vector<int> first_bad(static_cast<size_t>(workers), -1);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            int lo = static_cast<int>(static_cast<long>(n) * t / workers);
            int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / workers);
            for (int i = lo; i < hi; ++i) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<size_t>(t)] = std::current_exception();
                    first_bad[static_cast<size_t>(t)] = i;
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();

    int bad = -1;
    std::exception_ptr err;
    for (size_t t = 0; t < errors.size(); ++t) {
        if (errors[t] && (bad < 0 || first_bad[t] < bad)) {
            bad = first_bad[t];
            err = errors[t];
        }
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace rti
