#include "funcbell/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace funcbell {

namespace {

std::atomic<unsigned> g_max_threads{0};

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1U : hw;
}

}  // namespace

void set_max_threads(unsigned n) { g_max_threads.store(n); }

unsigned max_threads() {
  const unsigned n = g_max_threads.load();
  return n == 0 ? default_threads() : n;
}

void parallel_blocks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                     std::size_t block_size) {
  if (n == 0) return;
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  const std::size_t n_workers = std::min<std::size_t>(max_threads(), n_blocks);

  auto run_block = [&](std::size_t blk) {
    const std::size_t begin = blk * block_size;
    body(begin, std::min(n, begin + block_size));
  };

  if (n_workers <= 1) {
    for (std::size_t blk = 0; blk < n_blocks; ++blk) run_block(blk);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      for (std::size_t blk = next.fetch_add(1); blk < n_blocks; blk = next.fetch_add(1)) {
        try {
          run_block(blk);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kLeaf = 32;
  if (values.size() <= kLeaf) {
    double s = 0.0;
    for (double x : values) s += x;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace funcbell
