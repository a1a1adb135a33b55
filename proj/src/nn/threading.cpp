#include "pitchstats/nn/threading.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "pitchstats/error.hpp"

namespace pitchstats::nn {

namespace {
std::atomic<int> g_threads{1};
}

void set_num_threads(int n) {
  if (n < 1) throw ValidationError("thread count must be >= 1");
  g_threads.store(n);
}

int num_threads() { return g_threads.load(); }

void parallel_for(Index n, const std::function<void(Index, Index)>& fn) {
  const Index workers = std::min<Index>(g_threads.load(), n);
  if (workers <= 1) {
    if (n > 0) fn(0, n);
    return;
  }
  const Index chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace pitchstats::nn
