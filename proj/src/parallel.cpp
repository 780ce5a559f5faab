#include "charlab/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace charlab {

void Executor::parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) const {
  const std::size_t chunks = std::min<std::size_t>(workers_, n);
  if (chunks <= 1) {
    if (n) body(0, n);
    return;
  }
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> threads;
  threads.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks, end = n * (c + 1) / chunks;
    threads.emplace_back([&, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

const Executor& Executor::serial() {
  static const Executor ex(1);
  return ex;
}

}  // namespace charlab
