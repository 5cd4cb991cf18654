// Shared numerical kernels: deterministic PRNG, adaptive quadrature and a
// small persistent worker pool (index-chunked, so results never depend on the
// thread count).
#pragma once

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "equilib/types.hpp"

namespace equilib {

// 64-bit linear congruential generator (Knuth MMIX constants). Deterministic
// across platforms; the uniform01 draw keeps the top 53 bits.
struct lcg64 {
  std::uint64_t state;

  explicit lcg64(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ULL) {
    next();
    next();
  }

  std::uint64_t next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform point on the disk of given radius, by rejection from the square.
  cplx uniform_disk(double radius) {
    for (;;) {
      const double x = 2.0 * uniform01() - 1.0;
      const double y = 2.0 * uniform01() - 1.0;
      if (x * x + y * y <= 1.0) return cplx{radius * x, radius * y};
    }
  }
};

inline int worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("EQUILIB_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned>(cap) < hw) hw = static_cast<unsigned>(cap);
  }
  return static_cast<int>(hw);
}

// Persistent pool; jobs are (chunk index -> work) closures. Workers pull
// chunk indices from an atomic counter, so scheduling never changes which
// indices a chunk contains.
class thread_pool {
 public:
  static thread_pool& instance() {
    static thread_pool pool(worker_threads());
    return pool;
  }

  int size() const { return static_cast<int>(workers_.size()) + 1; }

  void run(int chunks, const std::function<void(int)>& job) {
    if (chunks <= 0) return;
    if (workers_.empty() || chunks == 1) {
      for (int c = 0; c < chunks; ++c) job(c);
      return;
    }
    {
      std::unique_lock<std::mutex> lk(mu_);
      job_ = &job;
      chunks_ = chunks;
      next_chunk_.store(0, std::memory_order_relaxed);
      pending_ = static_cast<int>(workers_.size());
      ++generation_;
    }
    cv_.notify_all();
    // The calling thread participates as well.
    drain();
    std::unique_lock<std::mutex> lk(mu_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    job_ = nullptr;
  }

  ~thread_pool() {
    {
      std::unique_lock<std::mutex> lk(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }

 private:
  explicit thread_pool(int threads) {
    for (int i = 1; i < threads; ++i) {
      workers_.emplace_back([this] { worker_loop(); });
    }
  }

  void drain() {
    for (;;) {
      const int c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks_) return;
      (*job_)(c);
    }
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* job = nullptr;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
        job = job_;
      }
      if (job != nullptr) {
        for (;;) {
          const int c = next_chunk_.fetch_add(1, std::memory_order_relaxed);
          if (c >= chunks_) break;
          (*job)(c);
        }
      }
      {
        std::unique_lock<std::mutex> lk(mu_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  std::atomic<int> next_chunk_{0};
  int chunks_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
};

// Chunked parallel loop over [0, n). fn(i) must only write state owned by
// index i; partial results are combined by the caller in index order.
template <class F>
void parallel_for(int n, F&& fn, int min_grain = 256) {
  if (n <= 0) return;
  auto& pool = thread_pool::instance();
  const int threads = pool.size();
  if (threads == 1 || n < min_grain) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int chunks = std::min(4 * threads, std::max(1, n / std::max(1, min_grain / 4)));
  const int step = (n + chunks - 1) / chunks;
  std::function<void(int)> job = [&](int c) {
    const int lo = c * step;
    const int hi = std::min(n, lo + step);
    for (int i = lo; i < hi; ++i) fn(i);
  };
  pool.run(chunks, job);
}

// Adaptive Simpson quadrature with the usual 15x error heuristic.
namespace detail {
template <class F>
double simpson_rec(F& f, double a, double m, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

// Shortest signed angle taking a -> b (both nonzero).
inline double arg_increment(cplx a, cplx b) { return std::arg(b * std::conj(a)); }

}  // namespace equilib
