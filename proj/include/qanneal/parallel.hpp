#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qanneal {

namespace detail {
inline std::atomic<unsigned> g_thread_count{1};
}  // namespace detail

/// Worker threads used by the library's parallel loops. Results never depend on it.
inline void set_thread_count(unsigned threads) {
  detail::g_thread_count.store(std::max(1U, threads));
}

inline unsigned thread_count() { return detail::g_thread_count.load(); }

/// Calls fn(i) for every i in [0, count). Work is split by static interleaving;
/// fn must only touch state owned by index i.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::size_t kReduceBlock = std::size_t{1} << 12;

/// Deterministic reduction over [0, size): map_block(begin, end) produces one
/// partial per fixed-size block, partials are then combined as a pairwise tree.
/// The block layout is independent of the thread count, so the result is too.
template <class T, class MapBlock, class Combine>
T blocked_reduce(std::size_t size, T identity, MapBlock&& map_block, Combine&& combine) {
  if (size == 0) return identity;
  const std::size_t blocks = (size + kReduceBlock - 1) / kReduceBlock;
  std::vector<T> partial(blocks, identity);
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t begin = blk * kReduceBlock;
    partial[blk] = map_block(begin, std::min(size, begin + kReduceBlock));
  });
  while (partial.size() > 1) {
    std::vector<T> next;
    next.reserve((partial.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2) {
      next.push_back(combine(partial[i], partial[i + 1]));
    }
    if (partial.size() % 2 == 1) next.push_back(std::move(partial.back()));
    partial = std::move(next);
  }
  return std::move(partial.front());
}

/// Sum of f(i) over [0, size) with the deterministic block/tree order.
template <class Fn>
double deterministic_sum(std::size_t size, Fn&& f) {
  return blocked_reduce<double>(
      size, 0.0,
      [&](std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += f(i);
        return s;
      },
      [](double a, double b) { return a + b; });
}

/// Applies fn(i) to every index in [0, size), parallelized by block.
template <class Fn>
void blocked_for_each(std::size_t size, Fn&& fn) {
  const std::size_t blocks = (size + kReduceBlock - 1) / kReduceBlock;
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t begin = blk * kReduceBlock;
    const std::size_t end = std::min(size, begin + kReduceBlock);
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace qanneal
