#include "urank/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace urank::parallel {

int threads_from_env() {
  const char* env = std::getenv("UNCERTAIN_RANK_THREADS");
  if (env == nullptr) return 0;
  try {
    const int n = std::stoi(env);
    return n > 0 ? n : 0;
  } catch (...) {
    return 0;
  }
}

void set_threads(int n) {
  if (n <= 0) n = threads_from_env();
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

} // namespace urank::parallel
