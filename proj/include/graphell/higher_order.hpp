#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "graphell/graph.hpp"

namespace graphell {

class Nonlinearity;
struct SolveReport;
struct SolveOptions;

/// Lap^l u with Lap^0 u = u; neighbor sums restricted to D.
VertexFn iterated_laplacian(const DomainDecomp& dom, const VertexFn& u, std::size_t order);

/// |grad^k u|: slope of Lap^{(k-1)/2} u for odd k, |Lap^{k/2} u| for even k.
VertexFn higher_slope(const DomainDecomp& dom, const VertexFn& u, std::size_t k);

/// (int |grad^m u|^p dmu)^{1/p}
double wmp_norm(const DomainDecomp& dom, const VertexFn& u, std::size_t m, double p);

/// The weak (m,p)-Laplacian pairing of u against v. Throws
/// ZeroSlopeSingularity when p < 2 and |grad^m u| vanishes somewhere.
double mp_operator_weak(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v,
                        std::size_t m, double p);

/// Matrix of Lap on D (|D| x |D|).
Eigen::SparseMatrix<double> laplacian_matrix(const DomainDecomp& dom);
/// Dirichlet-form matrix on all of D: u^T K v = int Gamma(u,v) dmu.
Eigen::SparseMatrix<double> dirichlet_form_matrix(const DomainDecomp& dom);

/// Orthonormal basis (columns, in D coordinates) of the functions with
/// |grad^j u| = 0 on the boundary for j = 0..m-1. Every slope constraint is
/// linear because weights are positive: |grad v|(x) = 0 iff v is constant on
/// x and its D-neighbors. For m = 1 the basis is exactly the interior
/// coordinate vectors. Throws TrivialConstraintClass when the class is {0}.
Eigen::MatrixXd constraint_basis(const DomainDecomp& dom, std::size_t m);

/// int |grad^m u|^p dmu as a smooth function of u in D coordinates, with
/// gradient and Hessian. With eps > 0 the power is taken of (s^2 + eps^2)
/// instead of s^2, which keeps p < 2 differentiable at zero slope.
class MpFunctional {
 public:
  MpFunctional(const DomainDecomp& dom, std::size_t m, double p, double eps = 0.0);

  std::size_t order() const noexcept { return m_; }
  double exponent() const noexcept { return p_; }

  double value(const Eigen::VectorXd& u) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& u) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& u) const;
  /// Pointwise |grad^m u|^2 (regularization not applied).
  Eigen::VectorXd squared_slope(const Eigen::VectorXd& u) const;

 private:
  double power(double s2, double e) const;

  const DomainDecomp* dom_;
  std::size_t m_;
  double p_;
  double eps_;
  Eigen::MatrixXd inner_;  // Lap^{floor(m/2)} on D, dense
  Eigen::VectorXd mu_;
};

/// int |u|^p dmu with the same regularization convention.
double lp_mass(const DomainDecomp& dom, const Eigen::VectorXd& u, double p, double eps = 0.0);
Eigen::VectorXd lp_mass_gradient(const DomainDecomp& dom, const Eigen::VectorXd& u, double p,
                                 double eps = 0.0);

struct HigherOrderSpec {
  const DomainDecomp* dom = nullptr;
  std::size_t m = 1;
  double p = 2.0;
  const Nonlinearity* f = nullptr;
  double lambda = 1.0;
  std::optional<double> ar_beta;
  std::optional<double> ar_r0;
};

/// J(u) = ||u||^p / p - lambda int F(x,u) dmu.
double mp_energy(const HigherOrderSpec& spec, const VertexFn& u);
/// Euclidean gradient of mp_energy in D coordinates; the weak form against v
/// is gradient.dot(v).
Eigen::VectorXd mp_energy_gradient(const HigherOrderSpec& spec, const VertexFn& u);

SolveReport mp_energy_and_solve(const HigherOrderSpec& spec, const SolveOptions& options);

}  // namespace graphell
