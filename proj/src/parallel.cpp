// Copyright 2026 The tvelim Authors
// SPDX-License-Identifier: Apache-2.0

#include "tvelim/parallel.hpp"

#include <algorithm>

namespace tvelim {

ThreadPool::ThreadPool(std::size_t workers) : workers_(std::max<std::size_t>(workers, 1)) {
  // The calling thread takes part in every job, so spawn one fewer.
  for (std::size_t i = 1; i < workers_; ++i) threads_.emplace_back([this] { worker_loop(); });
}

ThreadPool::~ThreadPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  wake_.notify_all();
  for (auto& t : threads_) t.join();
}

void ThreadPool::worker_loop() {
  std::size_t seen = 0;
  for (;;) {
    std::unique_lock lock(mutex_);
    wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
    if (stop_) return;
    seen = generation_;
    while (job_ != nullptr && next_ < job_n_) {
      const std::size_t begin = next_;
      const std::size_t end = std::min(job_n_, begin + chunk_);
      next_ = end;
      ++active_;
      const auto* job = job_;
      lock.unlock();
      (*job)(begin, end);
      lock.lock();
      --active_;
    }
    if (active_ == 0) done_.notify_all();
  }
}

void ThreadPool::parallel_for(std::size_t n,
                              const std::function<void(std::size_t, std::size_t)>& body,
                              std::size_t grain) const {
  if (n == 0) return;
  if (workers_ == 1 || n <= grain) {
    body(0, n);
    return;
  }
  std::lock_guard call(call_mutex_);
  std::unique_lock lock(mutex_);
  job_ = &body;
  job_n_ = n;
  chunk_ = std::max<std::size_t>(grain / 4 + 1, (n + workers_ * 4 - 1) / (workers_ * 4));
  next_ = 0;
  ++generation_;
  wake_.notify_all();
  while (next_ < job_n_) {
    const std::size_t begin = next_;
    const std::size_t end = std::min(job_n_, begin + chunk_);
    next_ = end;
    ++active_;
    lock.unlock();
    body(begin, end);
    lock.lock();
    --active_;
  }
  done_.wait(lock, [&] { return active_ == 0; });
  job_ = nullptr;
}

void parallel_for(const ThreadPool* pool, std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body, std::size_t grain) {
  if (pool == nullptr) {
    if (n > 0) body(0, n);
    return;
  }
  pool->parallel_for(n, body, grain);
}

}  // namespace tvelim
