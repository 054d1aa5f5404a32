#include "popqc/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace popqc {

unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

void parallel_for(unsigned threads, std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (grain == 0) grain = 1;

  std::size_t blocks = (n + grain - 1) / grain;
  unsigned workers = threads;
  if (workers > blocks) workers = static_cast<unsigned>(blocks);
  if (workers <= 1) {
    body(0, n);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto run = [&]() {
    while (true) {
      std::size_t block = next.fetch_add(1, std::memory_order_relaxed);
      if (block >= blocks) return;
      std::size_t begin = block * grain;
      std::size_t end = begin + grain < n ? begin + grain : n;
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned i = 0; i + 1 < workers; ++i) {
    pool.emplace_back(run);
  }
  run();
  for (std::thread& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace popqc
