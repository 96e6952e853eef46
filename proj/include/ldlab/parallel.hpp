#ifndef LDLAB_PARALLEL_HPP
#define LDLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace ldlab {

/// Worker count: LDLAB_THREADS if set and positive, else hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("LDLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n) on up to `threads` workers. Indices are
/// handed out dynamically; callers write into per-index slots so the result
/// does not depend on scheduling. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

} // namespace ldlab

#endif // LDLAB_PARALLEL_HPP
