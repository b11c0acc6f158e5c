#pragma once

#include <cstddef>
#include <cstdint>

#include "graphell/graph.hpp"

namespace graphell {

struct EigenResult {
  double lambda1 = 0.0;
  /// Zero on the boundary, unit L2(mu) norm, largest-magnitude entry positive.
  VertexFn eigenfunction;
  /// ||L u - lambda1 M u||_inf over the interior.
  double residual = 0.0;
  bool iterative = false;
};

/// Smallest Dirichlet eigenvalue of -Lap on the domain. Dense symmetric solve
/// up to the dense limit, inverse iteration with a sparse factorization above.
EigenResult lambda1(const DomainDecomp& dom);

/// Dirichlet energy over the L2(mu) mass; u must vanish on the boundary.
double rayleigh_quotient(const DomainDecomp& dom, const VertexFn& u);

struct LambdaMpResult {
  double value = 0.0;
  VertexFn certificate;
  /// True for p != 2: the value is the best local minimum over the restarts.
  bool heuristic = false;
  bool converged = true;
  std::size_t restarts = 0;
  std::size_t best_restart = 0;
};

/// Infimum of int |grad^m u|^p / int |u|^p over the constraint class. Exact
/// generalized eigenvalue for p = 2; multistart descent otherwise.
LambdaMpResult lambda_mp(const DomainDecomp& dom, std::size_t m, double p, std::uint64_t seed = 0,
                         std::size_t restarts = 16);

/// Value of the p-Rayleigh quotient at u (no regularization).
double mp_rayleigh_quotient(const DomainDecomp& dom, const VertexFn& u, std::size_t m, double p);

}  // namespace graphell
