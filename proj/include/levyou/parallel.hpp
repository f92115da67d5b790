#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace levyou {

/// Number of workers to use: `requested` if positive, otherwise
/// hardware concurrency; always capped by LEVYOU_THREADS when set.
int worker_count(int requested = 0);

/// Calls body(begin, end, worker) on contiguous chunks of [0, n).
template <class Body>
void parallel_chunks(std::size_t n, int workers, Body&& body) {
  if (workers <= 1 || n < 2) {
    body(std::size_t{0}, n, 0);
    return;
  }
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (std::size_t k = 0; k < w; ++k) {
    const std::size_t begin = n * k / w;
    const std::size_t end = n * (k + 1) / w;
    pool.emplace_back([&, begin, end, k] {
      try {
        body(begin, end, static_cast<int>(k));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace levyou
