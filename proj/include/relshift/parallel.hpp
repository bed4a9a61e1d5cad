#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace relshift {

/// Worker count from RELSHIFT_WORKERS, falling back to the hardware concurrency.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("RELSHIFT_WORKERS")) {
    try {
      const long n = std::stol(env);
      if (n > 0) return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(block, begin, end) for every contiguous block of [0, n). Block
/// boundaries depend only on n and block_size, never on the worker count.
/// The first exception thrown by any block is rethrown after all workers join.
template <class Body>
void parallel_blocks(std::size_t n, std::size_t block_size, std::size_t workers, Body&& body) {
  if (n == 0) return;
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  workers = std::clamp<std::size_t>(workers, 1, blocks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      try {
        body(b, b * block_size, std::min(n, (b + 1) * block_size));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace relshift
