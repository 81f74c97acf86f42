#include "liftpde/parallel.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace liftpde {
namespace {

int read_worker_count() {
  if (const char* env = std::getenv("LIFTPDE_THREADS")) {
    try {
      const int n = std::stoi(env);
      return std::clamp(n, 1, 256);
    } catch (...) {
      // Unparseable values fall through to the hardware default.
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Minimal persistent pool: one task broadcast at a time, main thread joins in
// as a worker. Kept deliberately simple; the solver calls this once per sweep
// of the lattice, so dispatch overhead is immaterial.
class Pool {
 public:
  explicit Pool(int workers) {
    for (int i = 0; i < workers - 1; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~Pool() {
    {
      std::unique_lock lk(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  void run(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
    const int parts = static_cast<int>(threads_.size()) + 1;
    if (n <= 0) return;
    if (parts == 1) {
      fn(0, n);
      return;
    }
    {
      std::unique_lock lk(mu_);
      task_ = &fn;
      total_ = n;
      parts_ = parts;
      next_part_ = 0;
      remaining_ = parts;
      error_ = nullptr;
      ++generation_;
    }
    cv_.notify_all();
    work_until_done();
  }

 private:
  void run_part(int part) {
    const std::int64_t lo = total_ * part / parts_;
    const std::int64_t hi = total_ * (part + 1) / parts_;
    if (lo < hi) {
      try {
        (*task_)(lo, hi);
      } catch (...) {
        std::unique_lock lk(mu_);
        if (!error_) error_ = std::current_exception();
      }
    }
  }

  void work_until_done() {
    for (;;) {
      int part;
      {
        std::unique_lock lk(mu_);
        if (next_part_ >= parts_) break;
        part = next_part_++;
      }
      run_part(part);
      finish_part();
    }
    std::unique_lock lk(mu_);
    done_cv_.wait(lk, [this] { return remaining_ == 0; });
    if (error_) {
      auto err = error_;
      error_ = nullptr;
      std::rethrow_exception(err);
    }
  }

  void finish_part() {
    std::unique_lock lk(mu_);
    if (--remaining_ == 0) done_cv_.notify_all();
  }

  void worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
      int part = -1;
      {
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return stopping_ || (generation_ != seen && next_part_ < parts_); });
        if (stopping_) return;
        seen = generation_;
        if (next_part_ < parts_) part = next_part_++;
      }
      if (part >= 0) {
        run_part(part);
        finish_part();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::int64_t, std::int64_t)>* task_ = nullptr;
  std::int64_t total_ = 0;
  int parts_ = 1;
  int next_part_ = 0;
  int remaining_ = 0;
  std::uint64_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

}  // namespace

int worker_count() {
  static const int n = read_worker_count();
  return n;
}

void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn) {
  static Pool pool(worker_count());
  pool.run(n, fn);
}

}  // namespace liftpde
