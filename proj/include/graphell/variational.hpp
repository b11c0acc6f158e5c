#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "graphell/graph.hpp"
#include "graphell/nonlinearity.hpp"

namespace graphell {

enum class AlphaRegime {
  NonPositive,  // alpha <= 0 everywhere
  SmallL1,      // int |alpha| < mu0^2 lambda1
  /// Constant alpha = gamma < lambda1; the alpha-norm is still a norm
  /// although neither condition above need hold. Only assigned on request
  /// (the Yamabe path); otherwise such alpha is Invalid.
  ConstantBelowLambda1,
  Invalid,
};

std::string_view to_string(AlphaRegime r) noexcept;

struct LinearCoefficient {
  std::vector<double> alpha;  // local index order on D
  AlphaRegime regime = AlphaRegime::Invalid;
  double l1 = 0.0;  // int_D |alpha| dmu
};

LinearCoefficient classify_alpha(const DomainDecomp& dom, std::vector<double> alpha, double lambda1,
                                bool allow_constant = false);

/// -Lap u = alpha u + lambda f(x,u) on the interior, u = 0 on the boundary.
/// The spec caches lambda1 and the interior matrices every solver needs.
struct ProblemSpec {
  const DomainDecomp* dom = nullptr;
  LinearCoefficient alpha;
  Nonlinearity f;
  double lambda = 1.0;
  double lambda1 = 0.0;
  /// Interior matrix of ||u||_alpha^2: L - diag(mu alpha).
  Eigen::SparseMatrix<double> alpha_matrix;
  Eigen::VectorXd interior_mu;
};

ProblemSpec make_spec(const DomainDecomp& dom, std::vector<double> alpha, Nonlinearity f, double lambda,
                      bool allow_constant_alpha = false);
/// Same spec with a different lambda (matrices reused).
ProblemSpec with_lambda(const ProblemSpec& spec, double lambda);
/// Same spec with another nonlinearity.
ProblemSpec with_nonlinearity(const ProblemSpec& spec, Nonlinearity f);

double alpha_norm_sq(const ProblemSpec& spec, const VertexFn& u);
double alpha_norm(const ProblemSpec& spec, const VertexFn& u);

struct NormBounds {
  double lower = 1.0;
  double upper = 1.0;
};
NormBounds norm_equivalence_bounds(const ProblemSpec& spec);

double kappa(const ProblemSpec& spec);

/// 1/(mu0 sqrt(lambda1)), the constant in the sup-norm embedding as stated.
double embedding_constant(const DomainDecomp& dom, double lambda1);
/// 1/sqrt(mu0 lambda1): valid for every measure. The stated constant is at
/// least this large only when mu0 <= 1.
double sharp_embedding_constant(const DomainDecomp& dom, double lambda1);

struct EmbeddingResidual {
  double sup = 0.0;  // ||u||_inf - C ||u||
  double lnu = 0.0;  // ||u||_{L^nu} - mu(D)^{1/nu} C ||u||
};
/// Both residuals are <= 0 when the embedding holds with constant C.
EmbeddingResidual sup_norm_embedding_check(const DomainDecomp& dom, const VertexFn& u, double nu,
                                           double lambda1);
EmbeddingResidual sup_norm_embedding_check(const DomainDecomp& dom, const VertexFn& u, double nu,
                                           double lambda1, double constant);

/// J(u) = ||u||_alpha^2 / (2 lambda) - int F(x,u) dmu.
double energy(const ProblemSpec& spec, const VertexFn& u);

struct EnergyGradient {
  /// r(x) = -Lap u(x)/lambda - alpha u(x)/lambda - f(x,u(x)) on the interior,
  /// zero on the boundary. <J'(u),v> = sum over the interior of mu r v.
  VertexFn riesz;
};
EnergyGradient energy_gradient(const ProblemSpec& spec, const VertexFn& u);
/// <J'(u),v> evaluated from the weak form directly.
double energy_derivative(const ProblemSpec& spec, const VertexFn& u, const VertexFn& v);

/// R(x) = -Lap u(x) - alpha(x) u(x) - lambda f(x,u(x)), ordered as dom.interior().
Eigen::VectorXd classical_residual(const ProblemSpec& spec, const VertexFn& u);
double classical_residual_max(const ProblemSpec& spec, const VertexFn& u);

/// sup over ||v|| = 1 of |<u,v> - int alpha u v - lambda int f v|.
double weak_residual(const ProblemSpec& spec, const VertexFn& u);

/// weak <= upper * max|R| and max|R| <= lower * weak.
struct ResidualConstants {
  double upper = 0.0;
  double lower = 0.0;
};
ResidualConstants weak_classical_constants(const ProblemSpec& spec);

struct ArCheck {
  bool pass = true;
  bool one_sided = false;
  std::optional<std::size_t> witness_vertex;
  std::optional<double> witness_t;
  std::string reason;
  std::size_t samples = 0;
  /// Leading-term test as |t| grows; a sufficient condition beyond the grid.
  bool asymptotic_pass = false;
};

struct ArGrid {
  double t_max = 100.0;
  std::size_t points = 2001;
};

/// Sampled test of t f(x,t) >= beta F(x,t) > 0 for r0 <= |t| <= T (t >= r0
/// only when one_sided). Not a proof.
ArCheck check_ar(const DomainDecomp& dom, const Nonlinearity& f, double beta, double r0,
                 const ArGrid& grid = {}, bool one_sided = false);

struct SuperquadraticBounds {
  double b1 = 0.0;
  double b2 = 0.0;
};
/// F(x,t) >= b1 |t|^beta - b2 from the AR constants.
SuperquadraticBounds superquadratic_bounds(const DomainDecomp& dom, const Nonlinearity& f, double beta,
                                           double r0, bool one_sided = false);

/// rho / (2 max_{x in D, |s| <= kappa sqrt(rho)} |F(x,s)|); +infinity when F
/// vanishes on that set.
double lambda_admissible(const ProblemSpec& spec, double rho);

/// sup_{z>0} z^power / max_{x in vertices, |s|<=z} |F(x,s)|, possibly +infinity.
/// Log-grid scan on [1e-8, 1e8] refined by golden section; the unbounded
/// cases are decided from the extreme exponents of F.
double potential_quotient_sup(const Nonlinearity& f, std::span<const std::size_t> vertices, double power);

/// (1/kappa^2) sup_{z>0} z^2 / max_{x, |s|<=z} |F(x,s)|, possibly +infinity.
/// The admissible bound satisfies sup_rho lambda_admissible = lambda_star / 2.
double lambda_star(const ProblemSpec& spec);

struct F1Check {
  bool pass = false;
  double max_abs_f = 0.0;
  double bound = 0.0;
};
/// max over the interior and |t| <= M0 of |f| against mu0^2 M0 lambda1 / (2(sigma+1)).
F1Check check_f1(const ProblemSpec& spec, double M0, double sigma);

struct CorollaryCheck {
  bool condition = false;  // mu0 > 2 sqrt(max_{[-1,1]} f / lambda1)
  double max_f = 0.0;
  F1Check f1;  // the (M0, sigma) = (1, 1) instance the condition implies
};
CorollaryCheck check_corollary(const ProblemSpec& spec);

struct F1lCheck {
  bool pass = false;
  /// Closed-form limit of f(x,t)/t as t -> 0+, maximized over the interior.
  double limit = 0.0;
  /// Sampled ratios at t = 1e-2, 1e-4, ..., 1e-8 (maximum over the interior).
  std::vector<std::pair<double, double>> samples;
};
F1lCheck check_f1l(const DomainDecomp& dom, const Nonlinearity& f, double lambda1);

/// Smallest t in {1, 2, 4, ...} up to t_max with J(t u0) < -threshold.
std::optional<double> unboundedness_witness(const ProblemSpec& spec, const VertexFn& u0,
                                            double threshold = 1e6, double t_max = 1e6);

}  // namespace graphell
