#ifndef FLOQ_PARALLEL_HPP
#define FLOQ_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace floq {

// Worker count: FLOQUET_OM_THREADS caps parallelism when set, otherwise the
// hardware concurrency is used. Values < 1 fall back to 1.
inline unsigned worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("FLOQUET_OM_THREADS")) {
    long req = std::strtol(env, nullptr, 10);
    if (req >= 1 && static_cast<unsigned long>(req) < hw) return static_cast<unsigned>(req);
    if (req >= 1) return static_cast<unsigned>(req);
    return 1;
  }
  return hw;
}

// Runs fn(i) for i in [0, n). Iterations must be independent; the first
// exception thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace floq

#endif
