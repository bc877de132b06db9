#include "topocp/parallel.hpp"

#include <cstdlib>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace topocp {
namespace {

int runtime_default() {
#ifdef _OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

int g_threads = -1;
std::once_flag g_env_once;

void read_env() {
  if (const char* env = std::getenv("TOPOCP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) g_threads = n;
  }
}

}  // namespace

int max_threads() {
  std::call_once(g_env_once, read_env);
  return g_threads > 0 ? g_threads : runtime_default();
}

void set_max_threads(int n) {
  std::call_once(g_env_once, read_env);
  g_threads = n > 0 ? n : -1;
}

}  // namespace topocp
