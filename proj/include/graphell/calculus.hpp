#pragma once

#include <string_view>

#include <Eigen/SparseCore>

#include "graphell/graph.hpp"

namespace graphell {

// Neighbor sums below run over neighbors inside D. For interior vertices that
// is every neighbor; at boundary vertices the omitted terms vanish for
// functions that are zero on the boundary.

double laplacian(const DomainDecomp& dom, const VertexFn& u, std::size_t x);
double laplacian(const DomainDecomp& dom, const VertexFn& u, std::string_view x);
/// Laplacian at every vertex of D.
VertexFn laplacian(const DomainDecomp& dom, const VertexFn& u);

double gradient_form(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v, std::size_t x);
VertexFn gradient_form(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v);

double slope(const DomainDecomp& dom, const VertexFn& u, std::size_t x);
VertexFn slope(const DomainDecomp& dom, const VertexFn& u);

/// Integral over D of Gamma(u,v).
double dirichlet_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v);
/// Integral over D of |grad u|^2; the squared norm for functions zero on the boundary.
double dirichlet_energy(const DomainDecomp& dom, const VertexFn& u);
/// Integral of Gamma(u,v) plus the L2(mu) product: the full Sobolev inner product.
double sobolev_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v);
/// Integral over D of mu-weighted u v.
double l2_product(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v);

struct Stiffness {
  /// Rows and columns follow dom.interior(); (L u)(x) = -mu(x) Lap u(x).
  Eigen::SparseMatrix<double> interior;
  /// Interior rows, boundary columns (ordered as dom.boundary()); entries -w(x,y).
  Eigen::SparseMatrix<double> boundary_coupling;
};

Stiffness assemble_stiffness(const DomainDecomp& dom);
/// mu restricted to the interior, as a vector.
Eigen::VectorXd interior_mass(const DomainDecomp& dom);

/// |int Gamma(u,v) dmu + int (Lap u) v dmu| for v vanishing on the boundary.
double check_parts_identity(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v);

}  // namespace graphell
