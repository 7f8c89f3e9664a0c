#pragma once

// Static-partition parallel loops. Work item i always runs the same code on
// the same inputs, so per-item results do not depend on the thread count.
// Reductions go through `sum`, which is bitwise reproducible unless fast mode
// was selected.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

namespace hqc {

// 0 means "use hardware concurrency".
void set_thread_count(int n);
int thread_count();

// Reproducible mode (default on): reductions accumulate in index order.
// Fast mode: reductions accumulate per thread chunk, so the last bits may
// depend on the thread count.
void set_reproducible(bool on);
bool reproducible();

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  auto chunk = [&](std::size_t w) {
    const std::size_t begin = n * w / workers;
    const std::size_t end = n * (w + 1) / workers;
    for (std::size_t i = begin; i < end; ++i) fn(i);
  };
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(chunk, w);
  chunk(0);
  for (auto& t : pool) t.join();
}

double sum(std::span<const double> values);

// splitmix64 finalizer; used to derive independent per-member RNG seeds.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hqc
