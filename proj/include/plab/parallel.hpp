#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace plab {

inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on contiguous blocks. Callers write results into slot i,
// so the merged output never depends on the worker count. The first exception (in index
// order) is rethrown.
template <typename Fn>
void parallel_for(size_t count, unsigned workers, Fn fn) {
  workers = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<size_t>(count, 1)));
  if (workers <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const size_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        const size_t lo = w * block, hi = std::min(count, lo + block);
        for (size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace plab
