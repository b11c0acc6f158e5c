#include "graphell/kernels.hpp"

#include <algorithm>

namespace graphell::kernels {

namespace serial {

void laplacian(const DomainCsr& g, std::span<const double> u, std::span<double> out) {
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (std::size_t k = g.offsets[x]; k < g.offsets[x + 1]; ++k) {
      acc += g.weights[k] * (u[g.cols[k]] - u[x]);
    }
    out[x] = acc / g.mu[x];
  }
}

void gradient_form_density(const DomainCsr& g, std::span<const double> u,
                           std::span<const double> v, std::span<double> out) {
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (std::size_t k = g.offsets[x]; k < g.offsets[x + 1]; ++k) {
      const std::size_t y = g.cols[k];
      acc += g.weights[k] * (u[y] - u[x]) * (v[y] - v[x]);
    }
    out[x] = 0.5 * acc;
  }
}

double weighted_dot(const DomainCsr& g, std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) sum += g.mu[x] * a[x] * b[x];
  return sum;
}

double dirichlet_form(const DomainCsr& g, std::span<const double> u, std::span<const double> v) {
  std::vector<double> density(g.size());
  gradient_form_density(g, u, v, density);
  double sum = 0.0;
  for (double d : density) sum += d;
  return sum;
}

}  // namespace serial

double deterministic_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) if (blocks > 1)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += values[i];
    partial[static_cast<std::size_t>(b)] = acc;
  }
  double sum = 0.0;
  for (double p : partial) sum += p;
  return sum;
}

namespace omp {

void laplacian(const DomainCsr& g, std::span<const double> u, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t xi = 0; xi < n; ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    double acc = 0.0;
    for (std::size_t k = g.offsets[x]; k < g.offsets[x + 1]; ++k) {
      acc += g.weights[k] * (u[g.cols[k]] - u[x]);
    }
    out[x] = acc / g.mu[x];
  }
}

void gradient_form_density(const DomainCsr& g, std::span<const double> u,
                           std::span<const double> v, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t xi = 0; xi < n; ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    double acc = 0.0;
    for (std::size_t k = g.offsets[x]; k < g.offsets[x + 1]; ++k) {
      const std::size_t y = g.cols[k];
      acc += g.weights[k] * (u[y] - u[x]) * (v[y] - v[x]);
    }
    out[x] = 0.5 * acc;
  }
}

double weighted_dot(const DomainCsr& g, std::span<const double> a, std::span<const double> b) {
  std::vector<double> terms(g.size());
  const auto n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static) if (n > 4096)
  for (std::ptrdiff_t xi = 0; xi < n; ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    terms[x] = g.mu[x] * a[x] * b[x];
  }
  return deterministic_sum(terms);
}

double dirichlet_form(const DomainCsr& g, std::span<const double> u, std::span<const double> v) {
  std::vector<double> density(g.size());
  gradient_form_density(g, u, v, density);
  return deterministic_sum(density);
}

}  // namespace omp

}  // namespace graphell::kernels
