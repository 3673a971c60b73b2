#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace lpstab {
namespace detail {

/// Deterministic RNG built on raw mt19937_64 draws only, so streams do not
/// depend on the standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed ^ 0x9e3779b97f4a7c15ull) {}

  std::uint64_t raw() { return gen_(); }

  double uniform01() {
    return static_cast<double>(raw() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // in [0, n)
  std::uint64_t uniform_int(std::uint64_t n) { return raw() % n; }

  double sign() { return (raw() & 1) ? 1.0 : -1.0; }

  /// Sub-stream derivation, for per-item determinism under parallelism.
  Rng fork(std::uint64_t salt) {
    return Rng(raw() ^ (salt * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull));
  }

private:
  std::mt19937_64 gen_;
};

inline int thread_cap() {
  if (const char* env = std::getenv("LPSTAB_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

/// Runs f(i) for i in [0, n); results must be written to pre-sized per-index
/// slots so the outcome does not depend on scheduling. The lowest-index
/// exception, if any, is rethrown after all workers join.
template <class F>
void parallel_for(int n, F&& f) {
  const int threads = std::min(thread_cap(), n);
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  int first_error_index = n;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (i < first_error_index) {
            first_error_index = i;
            first_error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail
}  // namespace lpstab
