#include "nfmusic/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace nfmusic {

namespace {

int env_thread_cap() {
  const char* raw = std::getenv("NF_MUSIC_THREADS");
  if (raw == nullptr || *raw == '\0') {
    return 0;
  }
  try {
    const int cap = std::stoi(raw);
    return cap > 0 ? cap : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

int worker_count() {
  const int cap = env_thread_cap();
  const int available = omp_get_max_threads();
  return cap > 0 && cap < available ? cap : available;
}

void apply_thread_cap() {
  const int cap = env_thread_cap();
  if (cap > 0) {
    omp_set_num_threads(cap);
  }
}

}  // namespace nfmusic
