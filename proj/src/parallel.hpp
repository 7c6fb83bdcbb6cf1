#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace prlab {

/// Runs body(i) for i in [0, n) over contiguous static chunks.
/// Each index writes only its own slot, so results do not depend on the partition.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const std::size_t T = std::max<std::size_t>(1, std::min<std::size_t>(threads > 0 ? threads : 1, n));
    if (T <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(T);
    const std::size_t chunk = (n + T - 1) / T;
    for (std::size_t w = 0; w < T; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace prlab
