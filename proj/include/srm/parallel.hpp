#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace srm::parallel {

// SRM_THREADS when set, hardware concurrency otherwise, never below 1.
inline int default_threads() {
  if (const char* env = std::getenv("SRM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Evaluates fn(index) for index in [0, count) and returns the results slotted
// by index, so the outcome is independent of the parallelism degree.  fn must
// not touch shared mutable state; replicate randomness comes from seeding by
// index, never from a shared stream.
template <typename T, typename Fn>
std::vector<T> replicate_map(std::uint64_t count, int threads, Fn&& fn) {
  std::vector<T> out(count);
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      out[i] = fn(i);
    }
  };
  std::vector<std::thread> pool;
  int spawn = threads - 1;
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace srm::parallel
