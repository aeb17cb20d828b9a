#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace biassup {

// Runs fn(i) for every i in [0, n).  parallelism <= 1 runs inline.  Results
// must be written to pre-sized slots by index so aggregation order (and thus
// floating-point output) is independent of the worker count.  If any call
// throws, every worker finishes its drain and the lowest-index exception is
// rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int parallelism, Fn&& fn) {
  if (parallelism <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), n);
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace biassup
