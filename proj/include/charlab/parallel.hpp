#pragma once

// Static-chunk parallel loop. Work items write to disjoint, index-addressed
// outputs, so results do not depend on the worker count.

#include <cstddef>
#include <functional>

namespace charlab {

class Executor {
 public:
  explicit Executor(unsigned workers = 1) : workers_(workers == 0 ? 1 : workers) {}

  unsigned workers() const { return workers_; }

  // body(begin, end) over contiguous chunks of [0, n).
  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) const;

  static const Executor& serial();

 private:
  unsigned workers_;
};

}  // namespace charlab
