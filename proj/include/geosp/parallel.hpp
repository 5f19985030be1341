#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace geosp {

inline std::size_t default_worker_count() {
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs task(i) for every i in [0, count) on up to `workers` threads. Tasks
// must write only to their own output slots. If tasks throw, the exception
// from the lowest index is rethrown after all workers finish.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_index = count;

  auto drain = [&] {
    for (;;) {
      const auto i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };

  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(drain);
    drain();
  }
  if (error) std::rethrow_exception(error);
}

// Splits a worker budget between an outer loop of `tasks` items and the
// parallelism available inside each item.
struct WorkerSplit {
  std::size_t outer = 1;
  std::size_t inner = 1;
};

inline WorkerSplit split_workers(std::size_t workers, std::size_t tasks) {
  workers = std::max<std::size_t>(workers, 1);
  const auto outer = std::clamp<std::size_t>(tasks, 1, workers);
  return {outer, std::max<std::size_t>(1, workers / outer)};
}

}  // namespace geosp
