#include "skt/parallel.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <thread>
#include <vector>

namespace skt {

Executor::Executor(unsigned workers) : workers_(workers) {
  if (workers_ == 0) workers_ = std::max(1u, std::thread::hardware_concurrency());
}

void Executor::parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) const {
  if (n == 0) return;
  const std::size_t nthreads = std::min<std::size_t>(workers_, n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }

  std::vector<std::exception_ptr> errors(nthreads);
  std::vector<std::size_t> error_index(nthreads, std::numeric_limits<std::size_t>::max());
  std::vector<std::thread> threads;
  threads.reserve(nthreads);
  const std::size_t block = (n + nthreads - 1) / nthreads;
  for (std::size_t t = 0; t < nthreads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(n, begin + block);
    threads.emplace_back([&, t, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        try {
          task(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_index[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : threads) th.join();

  std::size_t first = std::numeric_limits<std::size_t>::max();
  std::exception_ptr err;
  for (std::size_t t = 0; t < nthreads; ++t) {
    if (errors[t] && error_index[t] < first) {
      first = error_index[t];
      err = errors[t];
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace skt
