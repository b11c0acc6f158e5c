#pragma once

// Data-parallel vertex kernels. Each kernel exists twice: a plain serial loop
// kept as the reference implementation, and an OpenMP version used by the
// library. Reductions in the OpenMP versions sum fixed-size blocks and then
// combine the block partials in order, so results do not depend on the
// number of threads.

#include <cstddef>
#include <span>
#include <vector>

namespace graphell::kernels {

/// Compressed adjacency of a domain: neighbors of local vertex x are
/// cols[offsets[x] .. offsets[x+1]) with matching weights.
struct DomainCsr {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> cols;
  std::vector<double> weights;
  std::vector<double> mu;

  std::size_t size() const noexcept { return mu.size(); }
};

inline constexpr std::size_t kReductionBlock = 1024;

namespace serial {

/// out[x] = (1/mu(x)) sum_y w(x,y) (u(y) - u(x))
void laplacian(const DomainCsr& g, std::span<const double> u, std::span<double> out);
/// out[x] = mu(x) Gamma(u,v)(x), the integrand of the gradient form.
void gradient_form_density(const DomainCsr& g, std::span<const double> u,
                           std::span<const double> v, std::span<double> out);
/// sum_x mu(x) a(x) b(x)
double weighted_dot(const DomainCsr& g, std::span<const double> a, std::span<const double> b);
/// sum_x mu(x) Gamma(u,v)(x)
double dirichlet_form(const DomainCsr& g, std::span<const double> u, std::span<const double> v);

}  // namespace serial

namespace omp {

void laplacian(const DomainCsr& g, std::span<const double> u, std::span<double> out);
void gradient_form_density(const DomainCsr& g, std::span<const double> u,
                           std::span<const double> v, std::span<double> out);
double weighted_dot(const DomainCsr& g, std::span<const double> a, std::span<const double> b);
double dirichlet_form(const DomainCsr& g, std::span<const double> u, std::span<const double> v);

}  // namespace omp

/// Block-ordered sum; identical result for any thread count.
double deterministic_sum(std::span<const double> values);

}  // namespace graphell::kernels
