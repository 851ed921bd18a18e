#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace th {

/// Worker count used by every parallel loop in the library. Defaults to the
/// number of hardware threads; 1 runs everything inline on the caller.
unsigned thread_count();
void set_thread_count(unsigned n);

/// Runs fn(i) for i in [0, n). Work is pulled from a shared counter, so the
/// assignment of indices to threads varies between runs; callers write into
/// per-index slots to keep results deterministic. If several calls throw,
/// the exception of the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace th
