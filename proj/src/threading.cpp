#include "mfe/threading.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace mfe {

namespace {
std::atomic<int> g_limit{0};
}

void set_thread_limit(int n) { g_limit.store(n < 0 ? 0 : n); }

int thread_limit() {
  const int limit = g_limit.load();
  if (limit > 0) return limit;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(n, thread_limit());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace mfe
