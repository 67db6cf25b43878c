#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace hma {

/// Execution knobs shared by the grid solvers. Node updates inside one sweep
/// are independent, so results do not depend on the worker count; workers = 1
/// is the deterministic single-threaded mode.
struct Execution {
    int workers = 1;
};

/// Calls fn(lo, hi) on disjoint chunks covering [0, n).
template <class Fn>
void parallel_for(int n, const Execution& exec, Fn&& fn) {
    const int w = std::clamp(exec.workers, 1, std::max(1, n));
    if (w == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int k = 0; k < w; ++k) {
        const int lo = static_cast<int>(static_cast<long long>(n) * k / w);
        const int hi = static_cast<int>(static_cast<long long>(n) * (k + 1) / w);
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
}

}  // namespace hma
