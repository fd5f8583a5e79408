#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

#include "mls/model.hpp"
#include "mls/spatial.hpp"

namespace mls::kernels {

// Data-parallel kernels. Each OpenMP version has a serial reference next to it; the
// tests require both to agree bitwise and the benchmark target compares their speed.

/// Dense covariance matrix over all location pairs, single-threaded reference.
Matrix covariance_matrix_serial(const CovarianceSpec& cov, const Matrix& locations);

/// Same matrix, rows distributed over OpenMP threads. Every entry is computed exactly
/// as in the serial version, so the result does not depend on the thread count.
Matrix covariance_matrix(const CovarianceSpec& cov, const Matrix& locations, int threads = 0);

/// Number of threads to use for `requested` (<= 0 means the OpenMP default).
int resolve_threads(int requested);

/// Calls fn(i) for i in [0, count) in order.
template <class Fn>
void for_each_index_serial(std::size_t count, Fn&& fn) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

/// Calls fn(i) for i in [0, count) across `threads` workers (dynamic schedule).
/// fn must write only to slot i of its output. The first exception thrown by any
/// iteration is rethrown after the loop.
template <class Fn>
void for_each_index(std::size_t count, int threads, Fn&& fn) {
    const int nt = resolve_threads(threads);
    if (nt <= 1 || count <= 1) {
        for_each_index_serial(count, fn);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (long long i = 0; i < total; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace mls::kernels
