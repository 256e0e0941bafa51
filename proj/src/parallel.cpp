// SPDX-License-Identifier: Apache-2.0
#include "quadri/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace quadri {

namespace {
std::atomic<unsigned> g_workers{0};

unsigned resolve_default() {
  if (const char* env = std::getenv("QUADRI_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}
}  // namespace

unsigned worker_count() {
  unsigned w = g_workers.load();
  if (w == 0) {
    w = resolve_default();
    g_workers.store(w);
  }
  return w;
}

void set_worker_count(unsigned workers) { g_workers.store(workers == 0 ? resolve_default() : workers); }

void parallel_for(std::int64_t n_tasks, const std::function<void(std::int64_t)>& body) {
  if (n_tasks <= 0) return;
  unsigned workers = std::min<std::int64_t>(worker_count(), n_tasks);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      std::int64_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_tasks);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace quadri
