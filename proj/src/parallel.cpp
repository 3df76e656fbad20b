#include "pqlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pqlab {

namespace {

thread_local bool t_in_worker = false;

}  // namespace

int default_workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  const std::size_t pool =
      std::min<std::size_t>(n, static_cast<std::size_t>(workers > 0 ? workers : default_workers()));
  if (pool <= 1 || t_in_worker) {
    for (std::size_t k = 0; k < n; ++k) body(k);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::size_t first_index = n;
  std::mutex err_mutex;
  auto run = [&] {
    t_in_worker = true;
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        body(k);
      } catch (...) {
        // Keep the lowest failing index so the reported error does not depend on timing.
        std::lock_guard<std::mutex> lock(err_mutex);
        if (k < first_index) {
          first_index = k;
          first = std::current_exception();
        }
      }
    }
    t_in_worker = false;
  };
  std::vector<std::thread> threads;
  threads.reserve(pool - 1);
  for (std::size_t t = 1; t < pool; ++t) threads.emplace_back(run);
  run();
  for (std::thread& t : threads) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace pqlab
