// Serial reference kernels against their OpenMP versions on a 2-D grid domain.
#include <cstddef>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "graphell/kernels.hpp"

namespace {

using graphell::kernels::DomainCsr;

DomainCsr grid(std::size_t side) {
  DomainCsr g;
  const std::size_t n = side * side;
  g.offsets.push_back(0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> w(0.5, 2.0);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t x = r * side + c;
      auto add = [&](std::size_t y) {
        g.cols.push_back(y);
        // Symmetric weight from the unordered pair.
        std::mt19937_64 e(std::min(x, y) * n + std::max(x, y));
        g.weights.push_back(w(e));
      };
      if (r > 0) add(x - side);
      if (c > 0) add(x - 1);
      if (c + 1 < side) add(x + 1);
      if (r + 1 < side) add(x + side);
      g.offsets.push_back(g.cols.size());
      g.mu.push_back(w(rng));
    }
  }
  return g;
}

std::vector<double> field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void BM_Laplacian(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto u = field(g.size(), 1);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      graphell::kernels::omp::laplacian(g, u, out);
    } else {
      graphell::kernels::serial::laplacian(g, u, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.size()));
}

template <bool Parallel>
void BM_DirichletForm(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto u = field(g.size(), 2);
  const auto v = field(g.size(), 3);
  for (auto _ : state) {
    double e = Parallel ? graphell::kernels::omp::dirichlet_form(g, u, v)
                        : graphell::kernels::serial::dirichlet_form(g, u, v);
    benchmark::DoNotOptimize(e);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.size()));
}

template <bool Parallel>
void BM_WeightedDot(benchmark::State& state) {
  const auto g = grid(static_cast<std::size_t>(state.range(0)));
  const auto a = field(g.size(), 4);
  const auto b = field(g.size(), 5);
  for (auto _ : state) {
    double d = Parallel ? graphell::kernels::omp::weighted_dot(g, a, b)
                        : graphell::kernels::serial::weighted_dot(g, a, b);
    benchmark::DoNotOptimize(d);
  }
}

}  // namespace

BENCHMARK(BM_Laplacian<false>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_Laplacian<true>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_DirichletForm<false>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_DirichletForm<true>)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_WeightedDot<false>)->Arg(256)->Arg(1024);
BENCHMARK(BM_WeightedDot<true>)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
