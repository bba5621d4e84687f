#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace navstyle {

// Runs body(begin, end) over contiguous chunks of [0, count) on up to
// `threads` threads. Each chunk must write only to its own slots, so the
// result is independent of the thread count.
template <typename Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  const std::size_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
}

}  // namespace navstyle
