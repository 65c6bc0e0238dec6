#pragma once

#include <atomic>
#include <future>
#include <thread>
#include <vector>

namespace flamelab {

// Order-preserving map over an index set: results land at the position of
// their input regardless of completion order, so reductions stay
// deterministic.  Falls back to a plain loop on single-core hosts.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& items, Fn fn)
    -> std::vector<decltype(fn(items[0]))> {
    using Out = decltype(fn(items[0]));
    std::vector<Out> out(items.size());
    if (items.empty()) return out;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers =
        static_cast<unsigned>(std::min<size_t>(hw, items.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < items.size(); ++i) out[i] = fn(items[i]);
        return out;
    }
    std::atomic<size_t> next{0};
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        futures.push_back(std::async(std::launch::async, [&]() {
            for (size_t i = next.fetch_add(1); i < items.size();
                 i = next.fetch_add(1))
                out[i] = fn(items[i]);
        }));
    for (auto& f : futures) f.get(); // propagates the first worker exception
    return out;
}

} // namespace flamelab
