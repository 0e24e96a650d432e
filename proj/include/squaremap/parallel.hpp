#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace squaremap {

/// Execution policy for the data-parallel kernels. `serial` is the reference
/// path kept for testing; both paths write per-item results into the same
/// slots, so any reduction done afterwards sees identical inputs.
enum class Exec { serial, parallel };

/// Environment variable that overrides the OpenMP worker count.
inline constexpr const char* kThreadsEnv = "SQUAREMAP_NUM_THREADS";

/// Applies the worker-count override from the environment, if set.
/// Returns the worker count in effect.
int configure_threads_from_env();

int max_threads();

namespace parallel::seq {

template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace parallel::seq

namespace parallel::omp {

// Exceptions may not cross the OpenMP region boundary; the first one thrown
// is captured and rethrown on the calling thread.
template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  std::exception_ptr first;
  std::mutex guard;
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace parallel::omp

template <typename Fn>
void for_each_index(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::parallel && n > 1) {
    parallel::omp::for_each_index(n, std::forward<Fn>(fn));
  } else {
    parallel::seq::for_each_index(n, std::forward<Fn>(fn));
  }
}

}  // namespace squaremap
