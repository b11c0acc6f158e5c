#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "graphell/config.hpp"
#include "graphell/error.hpp"
#include "graphell/higher_order.hpp"
#include "graphell/newton.hpp"
#include "graphell/nonlinearity.hpp"
#include "graphell/solvers.hpp"
#include "graphell/spectral.hpp"
#include "graphell/variational.hpp"

namespace graphell {

namespace {

void require_spec(const HigherOrderSpec& spec) {
  if (spec.dom == nullptr || spec.f == nullptr) throw Error(ErrorCode::InvalidArgument, "incomplete higher-order spec");
  if (spec.m == 0) throw Error(ErrorCode::InvalidArgument, "order m must be positive");
  if (!(spec.p > 1.0)) throw Error(ErrorCode::InvalidArgument, "exponent p must exceed 1");
  if (!(spec.lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  spec.f->check_size(spec.dom->size());
}

Eigen::VectorXd measure_vector(const DomainDecomp& dom) {
  Eigen::VectorXd mu(static_cast<Eigen::Index>(dom.size()));
  for (std::size_t x = 0; x < dom.size(); ++x) mu[static_cast<Eigen::Index>(x)] = dom.mu(x);
  return mu;
}

double potential(const HigherOrderSpec& spec, const Eigen::VectorXd& u) {
  double s = 0.0;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) s += spec.dom->mu(x) * spec.f->F(x, u[static_cast<Eigen::Index>(x)]);
  return s;
}

Eigen::VectorXd full_gradient(const HigherOrderSpec& spec, const MpFunctional& norm, const Eigen::VectorXd& u) {
  Eigen::VectorXd g = norm.gradient(u) / spec.p;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    g[i] -= spec.lambda * spec.dom->mu(x) * spec.f->f(x, u[i]);
  }
  return g;
}

}  // namespace

double mp_energy(const HigherOrderSpec& spec, const VertexFn& u) {
  require_spec(spec);
  const MpFunctional norm(*spec.dom, spec.m, spec.p);
  return norm.value(u.values()) / spec.p - spec.lambda * potential(spec, u.values());
}

Eigen::VectorXd mp_energy_gradient(const HigherOrderSpec& spec, const VertexFn& u) {
  require_spec(spec);
  const MpFunctional norm(*spec.dom, spec.m, spec.p);
  return full_gradient(spec, norm, u.values());
}

SolveReport mp_energy_and_solve(const HigherOrderSpec& spec, const SolveOptions& options) {
  require_spec(spec);
  const DomainDecomp& dom = *spec.dom;
  const Eigen::MatrixXd N = constraint_basis(dom, spec.m);
  if (spec.ar_beta && !(*spec.ar_beta > spec.p)) {
    throw Error(ErrorCode::InvalidArgument, "the AR exponent must exceed p");
  }

  SolveReport report;
  report.seed = options.seed;
  report.lambda_used = spec.lambda;
  report.order_m = spec.m;
  report.order_p = spec.p;
  report.trace.mode = "deflate";
  const double lmp = lambda_mp(dom, spec.m, spec.p, options.seed).value;
  report.lambda_mp = lmp;
  const double kmp = 1.0 / (dom.mu0() * std::pow(lmp, 1.0 / spec.p));
  std::vector<std::size_t> verts(dom.size());
  std::iota(verts.begin(), verts.end(), std::size_t{0});
  const double sup = potential_quotient_sup(*spec.f, verts, spec.p);
  report.lambda_star = std::isfinite(sup) ? sup / std::pow(kmp, spec.p) : std::numeric_limits<double>::infinity();

  Hypotheses& h = report.hypotheses;
  h.alpha_regime = "none";
  h.explicit_boundary = dom.explicit_boundary();
  h.f_vanishes_at_origin = spec.f->vanishes_at_origin(dom.interior());
  h.lambda_below_star = spec.lambda < report.lambda_star;
  h.lambda_below_half_star = spec.lambda < 0.5 * report.lambda_star;
  if (spec.ar_beta && spec.ar_r0) {
    h.ar_beta = spec.ar_beta;
    h.ar_r0 = spec.ar_r0;
    if (*spec.ar_beta > 2.0) {
      const ArCheck ar = check_ar(dom, *spec.f, *spec.ar_beta, *spec.ar_r0);
      h.ar_sampled = ar.pass;
      h.ar_asymptotic = ar.asymptotic_pass;
      h.ar_one_sided = false;
    }
  }
  if (options.rho) {
    h.rho = options.rho;
    const double z = kmp * std::pow(*options.rho, 1.0 / spec.p);
    const double G = spec.f->max_abs_potential(verts, z).value;
    const double bound = G == 0.0 ? std::numeric_limits<double>::infinity() : *options.rho / (2.0 * G);
    h.lambda_admissible_bound = bound;
    h.lambda_in_admissible_interval = spec.lambda < bound;
  }

  const double eps = spec.p < 2.0 ? tolerances().slope_regularization : 0.0;
  const MpFunctional norm(dom, spec.m, spec.p, eps);
  const MpFunctional exact(dom, spec.m, spec.p);
  const Eigen::VectorXd mu = measure_vector(dom);
  const double mu_max = mu.size() ? mu.maxCoeff() : 1.0;

  CriticalProblem prob;
  prob.dim = N.cols();
  prob.energy = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd u = N * c;
    return norm.value(u) / spec.p - spec.lambda * potential(spec, u);
  };
  prob.gradient = [&](const Eigen::VectorXd& c) {
    return Eigen::VectorXd(N.transpose() * full_gradient(spec, norm, N * c));
  };
  prob.hessian = [&](const Eigen::VectorXd& c) {
    const Eigen::VectorXd u = N * c;
    Eigen::MatrixXd H = norm.hessian(u) / spec.p;
    for (std::size_t x = 0; x < dom.size(); ++x) {
      const auto i = static_cast<Eigen::Index>(x);
      H(i, i) -= spec.lambda * mu[i] * spec.f->df(x, u[i]);
    }
    return Eigen::MatrixXd(N.transpose() * H * N);
  };
  prob.accept = [&](const Eigen::VectorXd& c) {
    if (!c.allFinite()) return false;
    const Eigen::VectorXd u = N * c;
    const Eigen::VectorXd g = N.transpose() * full_gradient(spec, norm, u);
    const double gmax = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    const double usup = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    return gmax <= tolerances().solution_residual * (1.0 + usup) * std::max(1.0, mu_max);
  };
  prob.distance = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd d = N * (a - b);
    return d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  };

  const double base_radius = 10.0;
  report.trace.start_radius = base_radius;
  auto start = [&](std::size_t k, std::mt19937_64& rng) -> Eigen::VectorXd {
    const auto n = prob.dim;
    if (k == 0 || n == 0) return Eigen::VectorXd::Zero(n);
    const double R = base_radius * std::ldexp(1.0, static_cast<int>(k % 8) - 2);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = normal(rng);
    const double w = std::pow(exact.value(N * c), 1.0 / spec.p);
    if (!(w > 0.0)) return c;
    return c * (R * std::pow(unif(rng), 1.0 / static_cast<double>(n)) / w);
  };
  DeflationOptions dopt;
  dopt.budget = options.budget;
  dopt.seed = options.seed;
  dopt.shift = tolerances().deflation_shift;
  dopt.distinct = tolerances().distinct_sup;
  const DeflationResult res = deflated_search(prob, start, {}, dopt);
  report.trace.restarts = res.trace.restarts;
  report.trace.iterations = res.trace.iterations;
  report.trace.converged = res.trace.converged;
  report.trace.failed = res.trace.failed;
  report.trace.duplicates = res.trace.duplicates;
  report.trace.deflations = res.trace.deflations;

  for (const auto& c : res.roots) {
    Solution s;
    s.u = VertexFn(Eigen::VectorXd(N * c));
    for (std::size_t x : dom.boundary()) s.u[x] = 0.0;
    s.energy = mp_energy(spec, s.u);
    const Eigen::VectorXd slopes = exact.squared_slope(s.u.values());
    const bool singular = spec.p < 2.0 && (slopes.array() == 0.0).any();
    // Weak residual in the constraint basis; unregularized unless the slope vanishes.
    const Eigen::VectorXd g = N.transpose() * full_gradient(spec, singular ? norm : exact, s.u.values());
    s.classical_residual_max = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    const double w = std::pow(exact.value(s.u.values()), 1.0 / spec.p);
    s.alpha_norm_sq = w * w;
    if (options.rho) s.in_ball = std::pow(w, spec.p) < *options.rho;
    s.sign = sign_profile(dom, s.u);
    s.trivial = s.u.sup_norm() <= 1e-10;
    report.solutions.push_back(std::move(s));
  }
  sort_solutions(report.solutions);
  return report;
}

}  // namespace graphell
