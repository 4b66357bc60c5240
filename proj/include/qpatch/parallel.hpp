#ifndef QPATCH_PARALLEL_HPP
#define QPATCH_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace qpatch {

// Runs fn(i) for i in [0, count). Each index writes only its own output
// slot, so results are bit-identical for any thread count; reductions are
// done by the caller afterwards in index order.
template <typename Fn>
void parallel_for(std::size_t count, unsigned n_threads, Fn&& fn) {
    if (count == 0) return;
    unsigned hw = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
    if (hw == 0) hw = 1;
    if (hw > count) hw = static_cast<unsigned>(count);
    if (hw == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(hw);
    for (unsigned t = 0; t < hw; ++t) {
        workers.emplace_back([t, hw, count, &fn] {
            for (std::size_t i = t; i < count; i += hw) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace qpatch

#endif  // QPATCH_PARALLEL_HPP
