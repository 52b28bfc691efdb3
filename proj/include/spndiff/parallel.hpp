#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spndiff {

/// Name of the environment variable holding the default worker count.
inline constexpr const char* kJobsEnv = "SPNDIFF_JOBS";

/// 0 means "use $SPNDIFF_JOBS, else hardware concurrency".
unsigned resolve_jobs(unsigned requested);

/// Runs body(worker, begin, end) over [0, total) in chunks claimed
/// dynamically by `jobs` threads. The first exception is rethrown.
template <typename Body>
void parallel_chunks(unsigned jobs, std::uint32_t total, std::uint32_t chunk, Body&& body) {
  jobs = std::max(1u, jobs);
  std::atomic<std::uint32_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto run = [&](unsigned worker) {
    try {
      for (;;) {
        const std::uint32_t begin = next.fetch_add(chunk);
        if (begin >= total) break;
        body(worker, begin, std::min(total, begin + chunk));
      }
    } catch (...) {
      std::lock_guard lock(error_mu);
      if (!error) error = std::current_exception();
      next.store(total);
    }
  };
  if (jobs == 1) {
    run(0);
  } else {
    std::vector<std::jthread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(run, w);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace spndiff
