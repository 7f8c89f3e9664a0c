#include "hqc/parallel.hpp"

#include <algorithm>
#include <atomic>

namespace hqc {

namespace {
std::atomic<int> g_threads{0};
std::atomic<bool> g_reproducible{true};
}  // namespace

void set_thread_count(int n) { g_threads = std::max(0, n); }

int thread_count() {
  const int n = g_threads.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_reproducible(bool on) { g_reproducible = on; }
bool reproducible() { return g_reproducible.load(); }

double sum(std::span<const double> values) {
  if (reproducible() || thread_count() <= 1) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t workers = std::min<std::size_t>(thread_count(), values.size());
  if (workers == 0) return 0.0;
  std::vector<double> partial(workers, 0.0);
  parallel_for(workers, [&](std::size_t w) {
    const std::size_t begin = values.size() * w / workers;
    const std::size_t end = values.size() * (w + 1) / workers;
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i) s += values[i];
    partial[w] = s;
  });
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace hqc
