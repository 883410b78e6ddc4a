#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hetassoc {

inline std::size_t default_workers()
{
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

//! Runs body(k) for k in [0, count) on up to `workers` threads. Each index
//! is visited exactly once; callers write results into preallocated slots so
//! the outcome does not depend on scheduling. The first exception thrown by
//! a body is rethrown after all threads have joined.
template<class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body)
{
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k)
      body(k);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < count; k = next.fetch_add(1)) {
          try {
            body(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
              failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace hetassoc
