#pragma once

#include <cstdint>

namespace graphell::parallel {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for one independent task, derived only from the run seed and the
/// task's index so that results do not depend on scheduling.
std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) noexcept;

/// Caps the OpenMP team size from GRAPHELLIPTIC_THREADS when set.
void apply_thread_cap_from_env();
void set_threads(int n);
int max_threads();

}  // namespace graphell::parallel
