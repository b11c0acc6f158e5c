#include "graphell/calculus.hpp"

#include <cmath>
#include <vector>

#include "graphell/error.hpp"

namespace graphell {

namespace {

void require_size(const DomainDecomp& dom, const VertexFn& u) {
  if (u.size() != dom.size()) {
    throw Error(ErrorCode::DomainMismatch, "function has " + std::to_string(u.size()) +
                                               " values, domain has " + std::to_string(dom.size()));
  }
}

void require_vertex(const DomainDecomp& dom, std::size_t x) {
  if (x >= dom.size()) throw Error(ErrorCode::VertexOutsideDomain, "local index " + std::to_string(x));
}

std::span<const double> view(const VertexFn& u) {
  return {u.values().data(), u.size()};
}

}  // namespace

double laplacian(const DomainDecomp& dom, const VertexFn& u, std::size_t x) {
  require_size(dom, u);
  require_vertex(dom, x);
  double acc = 0.0;
  for (const auto& n : dom.neighbors(x)) acc += n.weight * (u[n.index] - u[x]);
  return acc / dom.mu(x);
}

double laplacian(const DomainDecomp& dom, const VertexFn& u, std::string_view x) {
  return laplacian(dom, u, dom.local_index(x));
}

VertexFn laplacian(const DomainDecomp& dom, const VertexFn& u) {
  require_size(dom, u);
  VertexFn out(dom.size());
  kernels::omp::laplacian(dom.csr(), view(u), {out.values().data(), out.size()});
  return out;
}

double gradient_form(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v, std::size_t x) {
  require_size(dom, u);
  require_size(dom, v);
  require_vertex(dom, x);
  double acc = 0.0;
  for (const auto& n : dom.neighbors(x)) acc += n.weight * (u[n.index] - u[x]) * (v[n.index] - v[x]);
  return acc / (2.0 * dom.mu(x));
}

VertexFn gradient_form(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v) {
  require_size(dom, u);
  require_size(dom, v);
  VertexFn out(dom.size());
  kernels::omp::gradient_form_density(dom.csr(), view(u), view(v), {out.values().data(), out.size()});
  for (std::size_t x = 0; x < dom.size(); ++x) out[x] /= dom.mu(x);
  return out;
}

double slope(const DomainDecomp& dom, const VertexFn& u, std::size_t x) {
  return std::sqrt(gradient_form(dom, u, u, x));
}

VertexFn slope(const DomainDecomp& dom, const VertexFn& u) {
  VertexFn g = gradient_form(dom, u, u);
  g.values() = g.values().cwiseSqrt();
  return g;
}

double dirichlet_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v) {
  require_size(dom, u);
  require_size(dom, v);
  return kernels::omp::dirichlet_form(dom.csr(), view(u), view(v));
}

double dirichlet_energy(const DomainDecomp& dom, const VertexFn& u) {
  return dirichlet_product(dom, u, u);
}

double l2_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v) {
  require_size(dom, u);
  require_size(dom, v);
  return kernels::omp::weighted_dot(dom.csr(), view(u), view(v));
}

double sobolev_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v) {
  return dirichlet_product(dom, u, v) + l2_product(dom, u, v);
}

Stiffness assemble_stiffness(const DomainDecomp& dom) {
  const auto n = static_cast<Eigen::Index>(dom.interior().size());
  const auto nb = static_cast<Eigen::Index>(dom.boundary().size());
  std::vector<Eigen::Triplet<double>> inner;
  std::vector<Eigen::Triplet<double>> coupling;
  std::vector<std::size_t> boundary_pos(dom.size(), DomainDecomp::npos);
  for (std::size_t k = 0; k < dom.boundary().size(); ++k) boundary_pos[dom.boundary()[k]] = k;

  for (std::size_t row = 0; row < dom.interior().size(); ++row) {
    const std::size_t x = dom.interior()[row];
    const auto r = static_cast<Eigen::Index>(row);
    double diag = 0.0;
    for (const auto& nbr : dom.neighbors(x)) {
      diag += nbr.weight;
      const std::size_t col = dom.interior_position(nbr.index);
      if (col != DomainDecomp::npos) {
        inner.emplace_back(r, static_cast<Eigen::Index>(col), -nbr.weight);
      } else {
        coupling.emplace_back(r, static_cast<Eigen::Index>(boundary_pos[nbr.index]), -nbr.weight);
      }
    }
    inner.emplace_back(r, r, diag);
  }
  Stiffness s;
  s.interior.resize(n, n);
  s.interior.setFromTriplets(inner.begin(), inner.end());
  s.boundary_coupling.resize(n, nb);
  s.boundary_coupling.setFromTriplets(coupling.begin(), coupling.end());
  return s;
}

Eigen::VectorXd interior_mass(const DomainDecomp& dom) {
  Eigen::VectorXd m(static_cast<Eigen::Index>(dom.interior().size()));
  for (std::size_t k = 0; k < dom.interior().size(); ++k) {
    m[static_cast<Eigen::Index>(k)] = dom.mu(dom.interior()[k]);
  }
  return m;
}

double check_parts_identity(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v) {
  require_size(dom, u);
  if (!is_dirichlet_class(dom, v)) {
    throw Error(ErrorCode::InvalidArgument, "test function must vanish on the boundary");
  }
  const VertexFn lap = laplacian(dom, u);
  return std::abs(dirichlet_product(dom, u, v) + l2_product(dom, lap, v));
}

}  // namespace graphell
