// Copyright (C) 2026 The LogicQA Engine Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace logicqa {

/// Reference path: evaluates fn(0..n-1) in order on the calling thread.
template <class F>
auto serial_map(std::size_t n, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    std::vector<std::invoke_result_t<F&, std::size_t>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
}

/// OpenMP fan-out of fn(0..n-1). Results land at their input index, so the
/// output never depends on completion order. If any call throws, the
/// exception from the lowest failing index is rethrown after the loop,
/// which matches what serial_map would have thrown.
template <class F>
auto parallel_map(std::size_t n, int threads, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
    using R = std::invoke_result_t<F&, std::size_t>;
    if (threads <= 1 || n <= 1) return serial_map(n, fn);

    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < count; ++i) {
        try {
            slots[static_cast<std::size_t>(i)].emplace(fn(static_cast<std::size_t>(i)));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

}  // namespace logicqa
