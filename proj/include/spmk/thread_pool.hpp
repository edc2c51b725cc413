#pragma once

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace spmk {

/// Persistent worker pool. One job runs at a time; the caller participates,
/// so `run` with max_workers == 1 degenerates to a serial loop. Tasks are
/// claimed through an atomic counter; outputs must be written to per-task
/// slots so results do not depend on which thread ran which task.
class ThreadPool {
 public:
  static ThreadPool& instance() {
    static ThreadPool pool(default_workers());
    return pool;
  }

  static std::size_t default_workers() {
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<std::size_t>(hc);
  }

  explicit ThreadPool(std::size_t total_workers) {
    std::size_t helpers = total_workers > 0 ? total_workers - 1 : 0;
    threads_.reserve(helpers);
    for (std::size_t i = 0; i < helpers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lock(mutex_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  /// Runs task(i) for all i in [0, count) with at most `max_workers`
  /// concurrent executors, the calling thread included.
  void run(std::size_t count, std::size_t max_workers,
           const std::function<void(std::size_t)>& task) {
    if (count == 0) return;
    if (max_workers <= 1 || threads_.empty() || count == 1) {
      for (std::size_t i = 0; i < count; ++i) task(i);
      return;
    }
    std::lock_guard<std::mutex> serialize(run_mutex_);
    Job job;
    job.count = count;
    job.task = &task;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      job_ = &job;
      std::size_t helpers = std::min(max_workers - 1, threads_.size());
      job.open_slots = helpers;
    }
    cv_.notify_all();

    // Caller participates.
    execute(job);

    std::unique_lock<std::mutex> lock(mutex_);
    if (job_ == &job) job_ = nullptr;  // no helper claimed a slot
    done_cv_.wait(lock, [&job] { return job.active.load() == 0; });
  }

 private:
  struct Job {
    std::size_t count = 0;
    const std::function<void(std::size_t)>* task = nullptr;
    std::atomic<std::size_t> next{0};
    std::atomic<int> active{0};
    std::size_t open_slots = 0;
  };

  static void execute(Job& job) {
    while (true) {
      std::size_t i = job.next.fetch_add(1, std::memory_order_relaxed);
      if (i >= job.count) break;
      (*job.task)(i);
    }
  }

  void worker_loop() {
    while (true) {
      Job* job = nullptr;
      {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] {
          return stop_ || (job_ != nullptr && job_->open_slots > 0);
        });
        if (stop_) return;
        job = job_;
        job->active.fetch_add(1);
        if (--job->open_slots == 0) job_ = nullptr;
      }
      execute(*job);
      {
        std::lock_guard<std::mutex> lock(mutex_);
        if (job->active.fetch_sub(1) == 1) done_cv_.notify_all();
      }
    }
  }

  std::vector<std::thread> threads_;
  std::mutex run_mutex_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  Job* job_ = nullptr;
  bool stop_ = false;
};

}  // namespace spmk
