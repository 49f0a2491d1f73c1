// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tvelim {

/// Fixed-size worker pool for data-parallel kernels. parallel_for splits
/// [0, n) into contiguous chunks; each chunk writes a disjoint output range,
/// so results never depend on the worker count.
class ThreadPool {
 public:
  explicit ThreadPool(std::size_t workers);
  ~ThreadPool();

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  std::size_t workers() const { return workers_; }

  /// Runs body(begin, end) over chunks of [0, n) and blocks until done.
  /// Ranges smaller than `grain` run inline on the caller.
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                    std::size_t grain = 1024) const;

 private:
  void worker_loop();

  std::size_t workers_;
  std::vector<std::thread> threads_;

  mutable std::mutex mutex_;
  mutable std::condition_variable wake_;
  mutable std::condition_variable done_;
  mutable const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
  mutable std::size_t job_n_ = 0;
  mutable std::size_t chunk_ = 0;
  mutable std::size_t next_ = 0;
  mutable std::size_t active_ = 0;
  mutable std::size_t generation_ = 0;
  mutable std::mutex call_mutex_;
  bool stop_ = false;
};

/// Runs body over [0, n), through the pool when one is given.
void parallel_for(const ThreadPool* pool, std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 1024);

}  // namespace tvelim
