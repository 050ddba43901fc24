#include "nngplab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nngp {
namespace {

std::atomic<int> g_workers{0};
thread_local bool t_in_pool = false;

int env_workers() {
  const char* v = std::getenv("NNGPLAB_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  try {
    return std::max(1, std::stoi(v));
  } catch (...) {
    return 1;
  }
}

}  // namespace

int worker_count() {
  const int w = g_workers.load();
  return w > 0 ? w : env_workers();
}

void set_worker_count(int workers) { g_workers.store(std::max(1, workers)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1 || t_in_pool) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&] {
    const bool outer = t_in_pool;
    t_in_pool = true;
    struct Reset {
      bool v;
      ~Reset() { t_in_pool = v; }
    } reset{outer};
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace nngp
