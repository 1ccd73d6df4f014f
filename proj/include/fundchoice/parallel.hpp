#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace fundchoice {

inline constexpr const char* kWorkersEnv = "FUNDCHOICE_WORKERS";

/// Worker count from FUNDCHOICE_WORKERS, else the machine's parallelism.
inline std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
/// so bodies writing to per-index slots need no synchronization.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t min_chunk = 256) {
  min_chunk = std::max<std::size_t>(min_chunk, 1);
  const std::size_t workers = std::min(worker_count(), (n + min_chunk - 1) / min_chunk);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace fundchoice
