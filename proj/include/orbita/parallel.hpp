#ifndef ORBITA_PARALLEL_HPP
#define ORBITA_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <span>

namespace orbita {

/// Worker count: ORBITA_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
unsigned thread_budget();

/// Runs body(i) for i in [0, n), split into contiguous chunks over at most
/// thread_budget() threads. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation; the result depends only on the order of
/// the input, never on how it was produced.
template <class T>
T pairwise_sum(std::span<const T> values) {
    if (values.empty()) {
        return T{};
    }
    if (values.size() <= 8) {
        T acc = values[0];
        for (std::size_t i = 1; i < values.size(); ++i) {
            acc += values[i];
        }
        return acc;
    }
    const std::size_t half = values.size() / 2;
    T left = pairwise_sum(values.first(half));
    left += pairwise_sum(values.subspan(half));
    return left;
}

}  // namespace orbita

#endif  // ORBITA_PARALLEL_HPP
