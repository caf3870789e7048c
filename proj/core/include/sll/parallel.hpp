#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sll {

/// Runs independent jobs on up to `workers` threads. Results are returned in
/// job order; the first exception (by job index) is rethrown.
template <class T>
std::vector<T> parallel_map(const std::vector<std::function<T()>>& jobs, int workers) {
    std::vector<T> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = jobs[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

} // namespace sll
