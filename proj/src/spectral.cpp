#include "graphell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "graphell/calculus.hpp"
#include "graphell/config.hpp"
#include "graphell/error.hpp"
#include "graphell/higher_order.hpp"
#include "graphell/parallel.hpp"

namespace graphell {

namespace {

void normalize_sign(Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v[arg] < 0.0) v = -v;
}

EigenResult dense_lambda1(const DomainDecomp& dom, const Stiffness& s, const Eigen::VectorXd& mass) {
  const Eigen::MatrixXd L = Eigen::MatrixXd(s.interior);
  const Eigen::VectorXd inv_sqrt = mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd A = inv_sqrt.asDiagonal() * L * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "dense eigensolver failed");

  EigenResult r;
  r.lambda1 = es.eigenvalues()[0];
  Eigen::VectorXd u = inv_sqrt.asDiagonal() * es.eigenvectors().col(0);
  u /= std::sqrt(u.dot(mass.asDiagonal() * u));
  normalize_sign(u);
  r.residual = (L * u - r.lambda1 * mass.asDiagonal() * u).cwiseAbs().maxCoeff();
  r.eigenfunction = from_interior(dom, u);
  return r;
}

EigenResult iterative_lambda1(const DomainDecomp& dom, const Stiffness& s, const Eigen::VectorXd& mass) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s.interior);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "stiffness factorization failed");

  const auto n = s.interior.rows();
  Eigen::VectorXd u = mass.cwiseSqrt();  // positive start overlaps the ground state
  u /= std::sqrt(u.dot(mass.asDiagonal() * u));
  double lambda = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXd y = ldlt.solve(mass.asDiagonal() * u);
    y /= std::sqrt(y.dot(mass.asDiagonal() * y));
    u = y;
    const Eigen::VectorXd Lu = s.interior * u;
    lambda = u.dot(Lu);  // u has unit M-norm
    residual = (Lu - lambda * mass.asDiagonal() * u).cwiseAbs().maxCoeff();
    if (residual <= 0.1 * tolerances().eigen_residual) break;
  }
  (void)n;
  if (!(residual <= tolerances().eigen_residual)) {
    throw Error(ErrorCode::NonConvergence, "inverse iteration residual " + std::to_string(residual));
  }
  normalize_sign(u);
  EigenResult r;
  r.lambda1 = lambda;
  r.residual = residual;
  r.eigenfunction = from_interior(dom, u);
  r.iterative = true;
  return r;
}

// Quadratic form of int |grad^m u|^2 dmu in D coordinates.
Eigen::MatrixXd mp_quadratic_form(const DomainDecomp& dom, std::size_t m) {
  const Eigen::MatrixXd lap = Eigen::MatrixXd(laplacian_matrix(dom));
  Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dom.size()),
                                                    static_cast<Eigen::Index>(dom.size()));
  for (std::size_t i = 0; i < m / 2; ++i) inner = lap * inner;
  Eigen::VectorXd mu(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t x = 0; x < dom.size(); ++x) mu[static_cast<Eigen::Index>(x)] = dom.mu(x);
  if (m % 2 == 0) return inner.transpose() * mu.asDiagonal() * inner;
  const Eigen::MatrixXd K = Eigen::MatrixXd(dirichlet_form_matrix(dom));
  return inner.transpose() * K * inner;
}

struct DescentResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd coeffs;
  bool converged = false;
};

// Limited-memory BFGS on the scale-invariant quotient num(Nc)/den(Nc).
DescentResult minimize_quotient(const DomainDecomp& dom, const Eigen::MatrixXd& basis,
                                const MpFunctional& num, double p, double eps, Eigen::VectorXd c) {
  auto eval = [&](const Eigen::VectorXd& coeffs, Eigen::VectorXd* grad) {
    const Eigen::VectorXd u = basis * coeffs;
    const double a = num.value(u);
    const double b = lp_mass(dom, u, p, eps);
    const double q = a / b;
    if (grad) *grad = basis.transpose() * ((num.gradient(u) - q * lp_mass_gradient(dom, u, p, eps)) / b);
    return q;
  };

  constexpr std::size_t kMemory = 8;
  std::vector<Eigen::VectorXd> s_hist;
  std::vector<Eigen::VectorXd> y_hist;
  c /= c.norm();
  Eigen::VectorXd g;
  double q = eval(c, &g);
  DescentResult out;
  for (int it = 0; it < 4000; ++it) {
    if (g.norm() <= 1e-12 * (1.0 + std::abs(q))) {
      out.converged = true;
      break;
    }
    // two-loop recursion
    Eigen::VectorXd d = -g;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      alpha[k] = rho * s_hist[k].dot(d);
      d -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double rho = 1.0 / y_hist[k].dot(s_hist[k]);
      const double beta = rho * y_hist[k].dot(d);
      d += (alpha[k] - beta) * s_hist[k];
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      d = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
    }
    double t = s_hist.empty() ? std::min(1.0, 0.1 / g.norm()) : 1.0;
    Eigen::VectorXd c_new;
    Eigen::VectorXd g_new;
    double q_new = q;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      c_new = c + t * d;
      q_new = eval(c_new, &g_new);
      if (std::isfinite(q_new) && q_new <= q + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      out.converged = g.norm() <= 1e-8 * (1.0 + std::abs(q));
      break;
    }
    const Eigen::VectorXd s = c_new - c;
    const Eigen::VectorXd y = g_new - g;
    const double improvement = q - q_new;
    c = c_new;
    g = g_new;
    q = q_new;
    if (s.dot(y) > 1e-300) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      if (s_hist.size() > kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
      }
    }
    const double scale = c.norm();
    if (scale < 0.5 || scale > 2.0) {
      c /= scale;
      q = eval(c, &g);
      s_hist.clear();
      y_hist.clear();
    }
    if (improvement <= 1e-16 * std::abs(q) && g.norm() <= 1e-9 * (1.0 + std::abs(q))) {
      out.converged = true;
      break;
    }
  }
  out.value = q;
  out.coeffs = c / c.norm();
  return out;
}

}  // namespace

EigenResult lambda1(const DomainDecomp& dom) {
  const Stiffness s = assemble_stiffness(dom);
  const Eigen::VectorXd mass = interior_mass(dom);
  if (dom.interior().size() <= tolerances().dense_limit) return dense_lambda1(dom, s, mass);
  return iterative_lambda1(dom, s, mass);
}

double rayleigh_quotient(const DomainDecomp& dom, const VertexFn& u) {
  if (!is_dirichlet_class(dom, u)) {
    throw Error(ErrorCode::InvalidArgument, "Rayleigh quotient needs a function vanishing on the boundary");
  }
  const double mass = l2_product(dom, u, u);
  if (mass == 0.0) throw Error(ErrorCode::ZeroFunction, "u vanishes identically");
  return dirichlet_energy(dom, u) / mass;
}

double mp_rayleigh_quotient(const DomainDecomp& dom, const VertexFn& u, std::size_t m, double p) {
  const double den = lp_mass(dom, u.values(), p);
  if (den == 0.0) throw Error(ErrorCode::ZeroFunction, "u vanishes identically");
  const double norm = wmp_norm(dom, u, m, p);
  return std::pow(norm, p) / den;
}

LambdaMpResult lambda_mp(const DomainDecomp& dom, std::size_t m, double p, std::uint64_t seed,
                         std::size_t restarts) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "order m must be positive");
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "exponent p must exceed 1");
  const Eigen::MatrixXd basis = constraint_basis(dom, m);

  // Exact p = 2 value; also the first start for p != 2.
  const Eigen::MatrixXd Q = mp_quadratic_form(dom, m);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t x = 0; x < dom.size(); ++x) mu[static_cast<Eigen::Index>(x)] = dom.mu(x);
  const Eigen::MatrixXd A = basis.transpose() * Q * basis;
  const Eigen::MatrixXd B = basis.transpose() * mu.asDiagonal() * basis;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(A, B);
  if (ges.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "generalized eigensolver failed");
  Eigen::VectorXd c2 = ges.eigenvectors().col(0);

  LambdaMpResult result;
  if (p == 2.0) {
    Eigen::VectorXd u = basis * c2;
    u /= std::sqrt(u.dot(mu.asDiagonal() * u));
    normalize_sign(u);
    result.value = ges.eigenvalues()[0];
    result.certificate = VertexFn(u);
    result.restarts = 1;
    return result;
  }

  const double eps = p < 2.0 ? tolerances().slope_regularization : 0.0;
  const MpFunctional num(dom, m, p, eps);
  const auto k = basis.cols();
  std::vector<DescentResult> runs(restarts);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(restarts); ++r) {
    Eigen::VectorXd start;
    if (r == 0) {
      start = c2;
    } else {
      std::mt19937_64 rng(parallel::task_seed(seed, static_cast<std::uint64_t>(r)));
      std::normal_distribution<double> normal;
      start.resize(k);
      for (Eigen::Index i = 0; i < k; ++i) start[i] = normal(rng);
    }
    runs[static_cast<std::size_t>(r)] = minimize_quotient(dom, basis, num, p, eps, start);
  }

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const VertexFn u(basis * runs[r].coeffs);
    const double v = mp_rayleigh_quotient(dom, u, m, p);
    if (v < best_value) {
      best_value = v;
      best = r;
    }
  }
  Eigen::VectorXd u = basis * runs[best].coeffs;
  normalize_sign(u);
  result.certificate = VertexFn(u);
  result.value = mp_rayleigh_quotient(dom, result.certificate, m, p);
  result.heuristic = true;
  result.converged = runs[best].converged;
  result.restarts = restarts;
  result.best_restart = best;
  return result;
}

}  // namespace graphell
