#pragma once

#include <cstddef>
#include <functional>

namespace skt {

// Runs independent per-index work on a fixed number of worker threads.
// Indices are assigned in contiguous blocks; callers must not rely on
// execution order, only on each index being visited exactly once. If any
// task throws, the exception from the lowest failing index is rethrown after
// all workers join.
class Executor {
 public:
  // workers == 0 selects std::thread::hardware_concurrency().
  explicit Executor(unsigned workers = 1);

  unsigned workers() const { return workers_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) const;

 private:
  unsigned workers_;
};

}  // namespace skt
