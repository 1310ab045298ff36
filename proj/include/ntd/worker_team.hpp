#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ntd {

/// Fixed team of persistent workers.
///
/// The calling thread acts as rank 0; `size() - 1` background threads are
/// spawned once in the constructor and parked on a condition variable between
/// jobs. run() hands the same job to every rank and returns when all ranks
/// have finished it.
class WorkerTeam {
 public:
  explicit WorkerTeam(int size);
  ~WorkerTeam();

  WorkerTeam(const WorkerTeam&) = delete;
  WorkerTeam& operator=(const WorkerTeam&) = delete;

  int size() const noexcept { return size_; }

  void run(const std::function<void(int rank)>& job);

  /// Number of threads spawned by all teams in this process.
  static std::size_t threads_spawned() noexcept;

 private:
  void worker_loop(int rank);

  int size_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(int)>* job_ = nullptr;
  std::size_t generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
};

}  // namespace ntd
