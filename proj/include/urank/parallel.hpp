#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>

namespace urank::parallel {

/// Caps worker threads for all OpenMP kernels. n <= 0 restores the default,
/// which is UNCERTAIN_RANK_THREADS when set, otherwise the available cores.
void set_threads(int n);
int threads();

/// Thread count requested by the environment, or 0 when unset/invalid.
int threads_from_env();

/// Scalar reductions are split into fixed-size chunks independent of the
/// thread count, then combined in chunk order. Results are therefore the same
/// at any thread count.
inline constexpr std::size_t kReductionChunk = 2048;

/// Runs fn(i) for i in [0, n) across the OpenMP team (or in a plain loop when
/// `serial`). An exception escaping fn is captured and the one raised at the
/// lowest index is rethrown after the loop, so failures are reported the same
/// way at every thread count.
template <class Fn>
void for_each_index(std::int64_t n, Fn&& fn, bool serial = false) {
  std::exception_ptr error;
  std::int64_t error_index = n;
  if (serial) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(urank_for_each_index)
      {
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

} // namespace urank::parallel
