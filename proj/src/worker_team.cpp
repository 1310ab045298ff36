#include "ntd/worker_team.hpp"

#include <atomic>
#include <stdexcept>

namespace ntd {
namespace {
std::atomic<std::size_t> g_threads_spawned{0};
}  // namespace

WorkerTeam::WorkerTeam(int size) : size_(size) {
  if (size < 1) throw std::invalid_argument("WorkerTeam: size must be >= 1");
  threads_.reserve(static_cast<std::size_t>(size - 1));
  for (int rank = 1; rank < size; ++rank) {
    threads_.emplace_back([this, rank] { worker_loop(rank); });
    g_threads_spawned.fetch_add(1, std::memory_order_relaxed);
  }
}

WorkerTeam::~WorkerTeam() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

std::size_t WorkerTeam::threads_spawned() noexcept {
  return g_threads_spawned.load(std::memory_order_relaxed);
}

void WorkerTeam::run(const std::function<void(int)>& job) {
  if (size_ == 1) {
    job(0);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    job_ = &job;
    pending_ = size_ - 1;
    ++generation_;
  }
  start_cv_.notify_all();
  job(0);
  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
}

void WorkerTeam::worker_loop(int rank) {
  std::size_t seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    (*job)(rank);
    {
      std::lock_guard lock(mutex_);
      --pending_;
    }
    done_cv_.notify_one();
  }
}

}  // namespace ntd
