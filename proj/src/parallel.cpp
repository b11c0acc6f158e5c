#include "graphell/parallel.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

namespace graphell::parallel {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) noexcept {
  return splitmix64(splitmix64(seed) ^ (task * 0x632be59bd9b4e019ULL + 1));
}

void apply_thread_cap_from_env() {
  const char* env = std::getenv("GRAPHELLIPTIC_THREADS");
  if (env == nullptr || *env == '\0') return;
  try {
    const int n = std::stoi(env);
    if (n > 0) omp_set_num_threads(n);
  } catch (const std::exception&) {
    // ignore malformed values
  }
}

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace graphell::parallel
