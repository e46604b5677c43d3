#pragma once

// Order-preserving parallel map: jobs are claimed from an atomic counter by a
// fixed pool of threads and every result lands in its own slot, so the output
// sequence does not depend on the thread count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace epu {

inline unsigned default_thread_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

template <class Result>
std::vector<Result> parallel_map(std::size_t count, unsigned threads, const std::function<Result(std::size_t)>& job) {
  std::vector<Result> out(count);
  if (count == 0) return out;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t i = next++; i < count; i = next++) out[i] = job(i);
    } catch (...) {
      errors[id] = std::current_exception();
      next = count;
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace epu
