#pragma once

#include <exception>
#include <mutex>

namespace nfmusic {

// Number of OpenMP workers, capped by NF_MUSIC_THREADS when set.
int worker_count();

// Applies NF_MUSIC_THREADS (if set) to the OpenMP runtime.
void apply_thread_cap();

// Runs body(i) for i in [0, n) on the OpenMP team. Exceptions cannot cross an
// OpenMP region, so the first one is captured and rethrown after the loop.
template <typename Body>
void parallel_for(int n, Body&& body, bool dynamic = false) {
  std::exception_ptr error;
  std::mutex error_lock;
  auto guarded = [&](int i) {
    try {
      body(i);
    } catch (...) {
      const std::lock_guard<std::mutex> lock(error_lock);
      if (!error) {
        error = std::current_exception();
      }
    }
  };
  if (dynamic) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) {
      guarded(i);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      guarded(i);
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace nfmusic
