#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace hardedge {

namespace detail {

inline std::atomic<int>& thread_override() {
  static std::atomic<int> value{-1};
  return value;
}

}  // namespace detail

/// Caps the worker count used by the data-parallel loops. 0 means "all
/// cores"; a negative value restores the RNM_THREADS environment default.
inline void set_thread_count(int threads) { detail::thread_override() = threads; }

/// Effective worker count: explicit override, else RNM_THREADS, else all cores.
inline unsigned thread_count() {
  int requested = detail::thread_override().load();
  if (requested < 0) {
    requested = 0;
    if (const char* env = std::getenv("RNM_THREADS")) {
      try {
        requested = std::max(0, std::stoi(env));
      } catch (...) {
        requested = 0;
      }
    }
  }
  if (requested > 0) return static_cast<unsigned>(requested);
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, count) on contiguous static chunks. Each index is
/// visited exactly once, so writing results into slot i keeps the output
/// independent of the thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
  if (threads == 0) threads = thread_count();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (count + threads - 1) / threads;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        bool expected = false;
        if (failed.compare_exchange_strong(expected, true)) failure = std::current_exception();
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

/// Pairwise (tree) summation with a fixed split rule; the result depends only
/// on the values and their order.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace hardedge
