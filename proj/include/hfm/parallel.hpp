#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hfm {

// Runs fn(0) .. fn(task_count-1) on up to `workers` threads. Tasks must
// write to disjoint state; the pool gives no ordering guarantees, so any
// reduction happens after it returns. Exceptions are captured and the
// first one rethrown.
inline void run_tasks(std::size_t task_count, int workers,
                      const std::function<void(std::size_t)>& fn) {
  if (task_count == 0) return;
  if (workers < 1) workers = 1;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(workers), task_count);
  if (nthreads <= 1) {
    for (std::size_t t = 0; t < task_count; ++t) fn(t);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t t = next.fetch_add(1, std::memory_order_relaxed);
      if (t >= task_count) break;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  for (std::size_t i = 0; i < nthreads; ++i) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

// Splits [0, n) into contiguous chunks and processes them as tasks.
// fn(begin, end) must only touch state owned by that index range.
inline void run_chunked(std::size_t n, int workers,
                        const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (workers < 1) workers = 1;
  const std::size_t chunks =
      std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  const std::size_t base = n / chunks;
  const std::size_t extra = n % chunks;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(chunks);
  std::size_t begin = 0;
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t len = base + (c < extra ? 1 : 0);
    ranges.emplace_back(begin, begin + len);
    begin += len;
  }
  run_tasks(chunks, workers,
            [&](std::size_t c) { fn(ranges[c].first, ranges[c].second); });
}

}  // namespace hfm
