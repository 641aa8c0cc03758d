#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bolab {

/// Contiguous block of work indices assigned to one worker.
struct WorkerRange {
  std::size_t worker = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits [0, count) into at most `workers` contiguous, nearly equal blocks.
inline std::vector<WorkerRange> partition_work(std::size_t count, std::size_t workers) {
  workers = std::max<std::size_t>(1, std::min(workers, std::max<std::size_t>(count, 1)));
  std::vector<WorkerRange> out;
  out.reserve(workers);
  const std::size_t base = count / workers;
  const std::size_t extra = count % workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    out.push_back({w, begin, begin + len});
    begin += len;
  }
  return out;
}

/// Runs fn(begin, end) on each block. Results must be written by index so that
/// the outcome does not depend on the worker count. The first exception thrown
/// by any worker is rethrown on the calling thread.
template <class Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  const auto ranges = partition_work(count, workers);
  if (ranges.size() == 1) {
    fn(ranges.front().begin, ranges.front().end);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  threads.reserve(ranges.size());
  for (const auto& r : ranges) {
    threads.emplace_back([&, r] {
      try {
        fn(r.begin, r.end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace bolab
