#pragma once

#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace adiawkb {

// Chunked parallel loop over [0, n); fn(i) must be safe to run concurrently
// for distinct i. Output slots are the caller's business (preallocate).
inline void parallel_for(int n, const std::function<void(int)>& fn,
                         int max_threads = 0) {
    if (n <= 0) return;
    int nt = max_threads > 0 ? max_threads
                             : static_cast<int>(std::thread::hardware_concurrency());
    if (nt < 1) nt = 1;
    nt = std::min(nt, n);
    if (nt == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    std::exception_ptr first_error;
    std::mutex err_mtx;
    for (int w = 0; w < nt; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (int i = w; i < n; i += nt) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace adiawkb
