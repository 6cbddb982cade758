#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <type_traits>
#include <vector>

namespace losline {

// Static partitioning: trial index ranges are a pure function of (n, workers),
// and per-trial RNG streams depend only on the trial index, so results are
// bit-identical for a fixed (seed, worker-count) pair regardless of
// scheduling. Partial results are merged in worker order by the caller.
// Exceptions thrown inside a worker are rethrown on the calling thread
// (first worker in index order wins).

template <class Fn>
auto run_partitioned(std::int64_t n, int workers, Fn&& fn)
    -> std::vector<std::invoke_result_t<Fn, std::int64_t, std::int64_t>> {
  using Acc = std::invoke_result_t<Fn, std::int64_t, std::int64_t>;
  if (workers < 1) workers = 1;
  if (workers > n && n > 0) workers = static_cast<int>(n);
  std::vector<Acc> parts(static_cast<std::size_t>(workers));
  if (workers == 1) {
    parts[0] = fn(0, n);
    return parts;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = n * w / workers;
    const std::int64_t hi = n * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        parts[static_cast<std::size_t>(w)] = fn(lo, hi);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return parts;
}

}  // namespace losline
