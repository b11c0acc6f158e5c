#include "graphell/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "graphell/calculus.hpp"
#include "graphell/config.hpp"
#include "graphell/error.hpp"
#include "graphell/newton.hpp"
#include "graphell/spectral.hpp"

namespace graphell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Factorization of the interior alpha-norm matrix A.
class AlphaFactor {
 public:
  explicit AlphaFactor(const Eigen::SparseMatrix<double>& A) : n_(A.rows()) {
    if (static_cast<std::size_t>(n_) <= tolerances().dense_limit) {
      dense_.compute(Eigen::MatrixXd(A));
      if (dense_.info() != Eigen::Success) fail();
      is_dense_ = true;
    } else {
      sparse_.compute(A);
      if (sparse_.info() != Eigen::Success) fail();
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    return is_dense_ ? Eigen::VectorXd(dense_.solve(b)) : Eigen::VectorXd(sparse_.solve(b));
  }

  /// c with c^T A c = |y|^2.
  Eigen::VectorXd from_unit(const Eigen::VectorXd& y) const {
    if (is_dense_) return dense_.matrixU().solve(y);
    const Eigen::VectorXd z = sparse_.matrixU().solve(y);
    return sparse_.permutationPinv() * z;
  }

 private:
  [[noreturn]] static void fail() {
    throw Error(ErrorCode::InvalidAlphaRegime, "the alpha-norm matrix is not positive definite");
  }

  Eigen::Index n_;
  bool is_dense_ = false;
  Eigen::LLT<Eigen::MatrixXd> dense_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> sparse_;
};

double solution_tolerance(const VertexFn& u) { return tolerances().solution_residual * (1.0 + u.sup_norm()); }

// J and its derivatives in interior coordinates c; u = from_interior(c).
CriticalProblem make_problem(const ProblemSpec& spec) {
  const DomainDecomp& dom = *spec.dom;
  const Eigen::SparseMatrix<double> A = spec.alpha_matrix;
  const Eigen::VectorXd mu = spec.interior_mu;
  const std::vector<std::size_t> in = dom.interior();
  const double lambda = spec.lambda;
  const Nonlinearity f = spec.f;

  CriticalProblem p;
  p.dim = static_cast<Eigen::Index>(in.size());
  p.energy = [=](const Eigen::VectorXd& c) {
    double pot = 0.0;
    for (std::size_t k = 0; k < in.size(); ++k) pot += mu[static_cast<Eigen::Index>(k)] * f.F(in[k], c[static_cast<Eigen::Index>(k)]);
    return c.dot(A * c) / (2.0 * lambda) - pot;
  };
  p.gradient = [=](const Eigen::VectorXd& c) {
    Eigen::VectorXd g = A * c / lambda;
    for (std::size_t k = 0; k < in.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      g[i] -= mu[i] * f.f(in[k], c[i]);
    }
    return g;
  };
  p.hessian = [=](const Eigen::VectorXd& c) {
    Eigen::MatrixXd H = Eigen::MatrixXd(A) / lambda;
    for (std::size_t k = 0; k < in.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      H(i, i) -= mu[i] * f.df(in[k], c[i]);
    }
    return H;
  };
  p.accept = [=](const Eigen::VectorXd& c) {
    if (!c.allFinite()) return false;
    double r = 0.0;
    const Eigen::VectorXd g = A * c;
    for (std::size_t k = 0; k < in.size(); ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      // Classical residual: (A c)_x / mu(x) = -Lap u(x) - alpha(x) u(x).
      r = std::max(r, std::abs(g[i] / mu[i] - lambda * f.f(in[k], c[i])));
    }
    const double sup = c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
    return r <= tolerances().solution_residual * (1.0 + sup);
  };
  p.distance = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
  };
  return p;
}

double a_norm_sq(const ProblemSpec& spec, const Eigen::VectorXd& c) { return c.dot(spec.alpha_matrix * c); }

// K = max over D and |t| <= r0 of (beta F - t f)^+.
double ps_constant(const ProblemSpec& spec, double beta, double r0) {
  double K = 0.0;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) {
    for (int sign : {1, -1}) {
      HalfLinePoly h = spec.f.potential_on(x, sign);
      for (auto& [e, c] : h.terms) c *= (beta - e);
      h.compact();
      K = std::max(K, max_on_interval(h, r0).first);
    }
  }
  return K;
}

bool ar_usable(const ProblemSpec& spec) {
  const auto beta = spec.f.ar_beta();
  const auto r0 = spec.f.ar_r0();
  if (!beta || !r0 || !(*beta > 2.0)) return false;
  return check_ar(*spec.dom, spec.f, *beta, *r0, {}, spec.f.truncated()).pass;
}

Hypotheses base_hypotheses(const ProblemSpec& spec, double lstar, std::optional<double> rho) {
  const DomainDecomp& dom = *spec.dom;
  Hypotheses h;
  h.alpha_regime = std::string(to_string(spec.alpha.regime));
  h.explicit_boundary = dom.explicit_boundary();
  h.f_vanishes_at_origin = spec.f.vanishes_at_origin(dom.interior());
  if (spec.f.ar_beta() && spec.f.ar_r0() && *spec.f.ar_beta() > 2.0) {
    const ArCheck ar = check_ar(dom, spec.f, *spec.f.ar_beta(), *spec.f.ar_r0(), {}, spec.f.truncated());
    h.ar_sampled = ar.pass;
    h.ar_asymptotic = ar.asymptotic_pass;
    h.ar_one_sided = ar.one_sided;
    h.ar_beta = spec.f.ar_beta();
    h.ar_r0 = spec.f.ar_r0();
  }
  h.lambda_below_star = spec.lambda < lstar;
  h.lambda_below_half_star = spec.lambda < 0.5 * lstar;
  if (rho) {
    h.rho = rho;
    const double bound = lambda_admissible(spec, *rho);
    h.lambda_admissible_bound = bound;
    h.lambda_in_admissible_interval = spec.lambda < bound;
    if (!(spec.lambda < bound)) h.warnings.push_back("lambda lies outside the admissible interval for rho");
  }
  return h;
}

}  // namespace

std::string_view to_string(SignProfile s) noexcept {
  switch (s) {
    case SignProfile::Positive: return "positive";
    case SignProfile::NonNegative: return "nonnegative";
    case SignProfile::NonPositive: return "nonpositive";
    case SignProfile::Negative: return "negative";
    case SignProfile::Signed: return "signed";
    case SignProfile::Zero: return "zero";
  }
  return "signed";
}

SignProfile sign_profile(const DomainDecomp& dom, const VertexFn& u) {
  bool pos = false;
  bool neg = false;
  bool zero = false;
  for (std::size_t x : dom.interior()) {
    if (u[x] > 0.0) {
      pos = true;
    } else if (u[x] < 0.0) {
      neg = true;
    } else {
      zero = true;
    }
  }
  if (pos && neg) return SignProfile::Signed;
  if (pos) return zero ? SignProfile::NonNegative : SignProfile::Positive;
  if (neg) return zero ? SignProfile::NonPositive : SignProfile::Negative;
  return SignProfile::Zero;
}

Solution describe_solution(const ProblemSpec& spec, const VertexFn& u, std::optional<double> rho) {
  Solution s;
  s.u = u;
  s.energy = energy(spec, u);
  s.classical_residual_max = classical_residual_max(spec, u);
  s.alpha_norm_sq = alpha_norm_sq(spec, u);
  if (rho) s.in_ball = s.alpha_norm_sq < *rho;
  s.sign = sign_profile(*spec.dom, u);
  s.trivial = u.sup_norm() <= 1e-10;
  return s;
}

void sort_solutions(std::vector<Solution>& s) {
  std::stable_sort(s.begin(), s.end(), [](const Solution& a, const Solution& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    const double ma = a.u.size() ? a.u.values().maxCoeff() : 0.0;
    const double mb = b.u.size() ? b.u.values().maxCoeff() : 0.0;
    return ma < mb;
  });
}

Solution minimize_in_ball(const ProblemSpec& spec, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const DomainDecomp& dom = *spec.dom;
  const AlphaFactor fac(spec.alpha_matrix);
  const CriticalProblem prob = make_problem(spec);
  const double radius = std::sqrt(rho);

  auto project = [&](Eigen::VectorXd c) {
    const double n = std::sqrt(std::max(0.0, a_norm_sq(spec, c)));
    if (n > radius) c *= radius / n;
    return c;
  };

  Eigen::VectorXd c = Eigen::VectorXd::Zero(prob.dim);
  double J = prob.energy(c);
  double t = 1.0;
  bool stalled = false;
  for (int it = 0; it < 20000 && !stalled; ++it) {
    const Eigen::VectorXd g = prob.gradient(c);
    const Eigen::VectorXd d = -spec.lambda * fac.solve(g);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Eigen::VectorXd trial = project(c + t * d);
      const double Jt = prob.energy(trial);
      if (Jt <= J + 1e-4 * g.dot(trial - c)) {
        const double step = std::sqrt(std::max(0.0, a_norm_sq(spec, trial - c)));
        const double cn = std::sqrt(std::max(0.0, a_norm_sq(spec, c)));
        stalled = step <= 1e-14 * (1.0 + cn);
        c = trial;
        J = Jt;
        accepted = true;
        t = std::min(1.0, 2.0 * t);
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    if (prob.accept(c)) break;
  }

  if (!(a_norm_sq(spec, c) < rho * (1.0 - tolerances().ball_margin))) {
    throw Error(ErrorCode::NoInteriorMinimizer, "the constrained minimizer lies on the sphere of radius sqrt(rho)");
  }
  const PolishResult pol = newton_polish(prob, c);
  if (!pol.converged || !(a_norm_sq(spec, pol.x) < rho)) {
    throw Error(ErrorCode::NonConvergence, "Newton polish of the ball minimizer failed");
  }
  return describe_solution(spec, from_interior(dom, pol.x), rho);
}

namespace {

// String method between the ball minimizer and a far point below it; the
// highest node is polished to a critical point.
std::optional<Eigen::VectorXd> mountain_pass_point(const ProblemSpec& spec, const CriticalProblem& prob,
                                                   const Eigen::VectorXd& a, std::size_t& iterations) {
  const AlphaFactor fac(spec.alpha_matrix);
  const double Ja = prob.energy(a);
  Eigen::VectorXd dir = Eigen::VectorXd::Ones(prob.dim);
  dir /= std::sqrt(a_norm_sq(spec, dir));
  Eigen::VectorXd b;
  bool found = false;
  for (double s = 1.0; s < 1e12; s *= 2.0) {
    b = a + s * dir;
    if (prob.energy(b) < Ja) {
      found = true;
      break;
    }
  }
  if (!found) return std::nullopt;

  constexpr int kNodes = 33;
  std::vector<Eigen::VectorXd> path(kNodes);
  for (int i = 0; i < kNodes; ++i) path[i] = a + (b - a) * (static_cast<double>(i) / (kNodes - 1));

  auto reparametrize = [&]() {
    std::vector<double> s(kNodes, 0.0);
    for (int i = 1; i < kNodes; ++i) s[i] = s[i - 1] + std::sqrt(std::max(0.0, a_norm_sq(spec, path[i] - path[i - 1])));
    std::vector<Eigen::VectorXd> out(kNodes);
    out.front() = path.front();
    out.back() = path.back();
    int j = 0;
    for (int i = 1; i < kNodes - 1; ++i) {
      const double target = s.back() * i / (kNodes - 1);
      while (j < kNodes - 2 && s[j + 1] < target) ++j;
      const double len = s[j + 1] - s[j];
      const double w = len > 0.0 ? (target - s[j]) / len : 0.0;
      out[i] = path[j] + w * (path[j + 1] - path[j]);
    }
    path = std::move(out);
  };

  const double h = 0.1 * spec.lambda;
  for (int it = 0; it < 4000; ++it) {
    ++iterations;
    double moved = 0.0;
    const double seg = std::sqrt(a_norm_sq(spec, path[1] - path[0]));
    for (int i = 1; i < kNodes - 1; ++i) {
      Eigen::VectorXd step = -h * fac.solve(prob.gradient(path[i]));
      const double len = std::sqrt(std::max(0.0, a_norm_sq(spec, step)));
      if (len > 0.5 * seg && len > 0.0) step *= 0.5 * seg / len;
      path[i] += step;
      moved = std::max(moved, std::sqrt(std::max(0.0, a_norm_sq(spec, step))));
    }
    reparametrize();
    if (moved <= 1e-10 * (1.0 + seg)) break;
  }
  int top = 1;
  for (int i = 1; i < kNodes - 1; ++i) {
    if (prob.energy(path[i]) > prob.energy(path[top])) top = i;
  }
  const PolishResult pol = newton_polish(prob, path[top], 100);
  iterations += pol.iterations;
  if (!pol.converged) return std::nullopt;
  return pol.x;
}

}  // namespace

SolveReport find_all_solutions(const ProblemSpec& spec, const SolveOptions& options) {
  if (spec.alpha.regime == AlphaRegime::Invalid) {
    throw Error(ErrorCode::InvalidAlphaRegime, "alpha satisfies neither admissible condition");
  }
  const DomainDecomp& dom = *spec.dom;
  SolveReport report;
  report.seed = options.seed;
  report.lambda_used = spec.lambda;
  report.lambda_star = lambda_star(spec);
  report.hypotheses = base_hypotheses(spec, report.lambda_star, options.rho);

  double base_radius = 10.0;
  if (ar_usable(spec)) {
    const PsCertificate ps = ps_boundedness_diagnostic(spec, {VertexFn(dom.size())});
    if (ps.usable) {
      report.hypotheses.ps_radius = ps.radius;
      base_radius = std::max(1.0, ps.radius);
    }
  }
  report.trace.start_radius = base_radius;

  const CriticalProblem prob = make_problem(spec);
  std::vector<Eigen::VectorXd> roots;

  if (options.mode == SolveMode::MountainPass) {
    report.trace.mode = "mountain-pass";
    const double rho = options.rho.value_or(1.0);
    const Solution first = minimize_in_ball(spec, rho);
    const Eigen::VectorXd a = to_interior(dom, first.u);
    roots.push_back(a);
    std::size_t iters = 0;
    if (auto mp = mountain_pass_point(spec, prob, a, iters)) {
      if (prob.distance(*mp, a) > tolerances().distinct_sup) roots.push_back(*mp);
    } else {
      report.hypotheses.warnings.push_back("mountain-pass path did not yield a second critical point");
    }
    report.trace.iterations = iters;
    report.trace.restarts = 1;
    report.trace.converged = roots.size();
  } else {
    report.trace.mode = "deflate";
    std::vector<Eigen::VectorXd> known;
    if (options.rho) {
      try {
        known.push_back(to_interior(dom, minimize_in_ball(spec, *options.rho).u));
      } catch (const Error& e) {
        report.hypotheses.warnings.emplace_back(e.what());
      }
    }
    const AlphaFactor fac(spec.alpha_matrix);
    const auto n = prob.dim;
    auto start = [&](std::size_t k, std::mt19937_64& rng) -> Eigen::VectorXd {
      if (k == 0 || n == 0) return Eigen::VectorXd::Zero(n);
      const double R = base_radius * std::ldexp(1.0, static_cast<int>(k % 8) - 2);
      std::normal_distribution<double> normal;
      std::uniform_real_distribution<double> unif;
      Eigen::VectorXd y(n);
      for (Eigen::Index i = 0; i < n; ++i) y[i] = normal(rng);
      y *= R * std::pow(unif(rng), 1.0 / static_cast<double>(n)) / y.norm();
      return fac.from_unit(y);
    };
    DeflationOptions dopt;
    dopt.budget = options.budget;
    dopt.seed = options.seed;
    dopt.shift = tolerances().deflation_shift;
    dopt.distinct = tolerances().distinct_sup;
    const DeflationResult res = deflated_search(prob, start, known, dopt);
    roots = res.roots;
    report.trace.restarts = res.trace.restarts;
    report.trace.iterations = res.trace.iterations;
    report.trace.converged = res.trace.converged;
    report.trace.failed = res.trace.failed;
    report.trace.duplicates = res.trace.duplicates;
    report.trace.deflations = res.trace.deflations;
  }

  for (const auto& c : roots) {
    Solution s = describe_solution(spec, from_interior(dom, c), options.rho);
    if (!(s.classical_residual_max <= solution_tolerance(s.u))) continue;
    report.solutions.push_back(std::move(s));
  }
  sort_solutions(report.solutions);
  return report;
}

SolveReport solve_truncated(const ProblemSpec& spec_in, const SolveOptions& options) {
  const ProblemSpec spec = with_lambda(spec_in, 1.0);
  const DomainDecomp& dom = *spec.dom;
  if (!spec.f.vanishes_at_origin(dom.interior())) {
    throw Error(ErrorCode::HypothesisViolated, "the truncation scheme needs f(x,0) = 0");
  }
  if (spec.alpha.regime != AlphaRegime::NonPositive) {
    throw Error(ErrorCode::HypothesisViolated, "the truncation scheme needs alpha <= 0");
  }
  const F1lCheck f1l = check_f1l(dom, spec.f, spec.lambda1);

  const ProblemSpec trunc = with_nonlinearity(spec, spec.f.positive_part());
  SolveReport report = find_all_solutions(trunc, options);
  report.hypotheses.f1l = f1l.pass;
  report.hypotheses.f1l_limit = f1l.limit;
  if (!f1l.pass) report.hypotheses.warnings.push_back("(f1l) check failed");
  if (report.hypotheses.ar_sampled && !*report.hypotheses.ar_sampled) {
    report.hypotheses.warnings.push_back("one-sided AR check failed");
  }

  std::vector<Solution> kept;
  double neg_norm = 0.0;
  for (const auto& s : report.solutions) {
    if (s.trivial) continue;
    VertexFn u = s.u;
    double neg = 0.0;
    VertexFn uneg(dom.size());
    for (std::size_t x = 0; x < dom.size(); ++x) {
      neg = std::max(neg, -u[x]);
      uneg[x] = std::max(0.0, -u[x]);
    }
    neg_norm = std::max(neg_norm, alpha_norm_sq(spec, uneg));
    if (neg > 1e-12 * (1.0 + u.sup_norm())) {
      throw Error(ErrorCode::NegativePartNonzero, "truncated solution has a negative part of size " + std::to_string(neg));
    }
    for (std::size_t x = 0; x < dom.size(); ++x) u[x] = std::max(0.0, u[x]);
    Solution d = describe_solution(spec, u, options.rho);
    if (!(d.classical_residual_max <= solution_tolerance(u))) {
      throw Error(ErrorCode::NonConvergence, "truncated solution does not solve the original problem");
    }
    kept.push_back(std::move(d));
  }
  if (kept.empty()) throw Error(ErrorCode::OnlyTrivialFound, "only the trivial solution was found");
  sort_solutions(kept);
  report.solutions = std::move(kept);
  report.hypotheses.negative_part_norm_sq = neg_norm;
  return report;
}

SolveReport yamabe_solve(const DomainDecomp& dom, double gamma, double p, const SolveOptions& options) {
  if (!(p > 2.0)) throw Error(ErrorCode::InvalidArgument, "the Yamabe exponent p must exceed 2");
  const double l1 = lambda1(dom).lambda1;
  if (!(gamma < l1)) {
    throw Error(ErrorCode::HypothesisViolated,
                "gamma = " + std::to_string(gamma) + " is not below lambda1 = " + std::to_string(l1));
  }
  Nonlinearity f = Nonlinearity::signed_power(1.0, p).positive_part();
  f.set_ar(p, 1.0);
  const ProblemSpec spec = make_spec(dom, std::vector<double>(dom.size(), gamma), f, 1.0, true);
  SolveReport report = find_all_solutions(spec, options);
  report.hypotheses.gamma = gamma;

  std::vector<Solution> positive;
  double neg_sq = 0.0;
  for (const auto& s : report.solutions) {
    if (s.trivial) continue;
    // u^- must vanish: its alpha-norm is forced to zero by testing with u^-.
    VertexFn neg(dom.size());
    for (std::size_t x = 0; x < dom.size(); ++x) neg[x] = std::max(0.0, -s.u[x]);
    const double q = dirichlet_energy(dom, neg) - gamma * l2_product(dom, neg, neg);
    neg_sq = std::max(neg_sq, q);
    if (neg.sup_norm() > 1e-12 * (1.0 + s.u.sup_norm())) {
      throw Error(ErrorCode::NegativePartNonzero, "Yamabe solution has a nonzero negative part");
    }
    double lowest = kInf;
    for (std::size_t x : dom.interior()) lowest = std::min(lowest, s.u[x]);
    if (lowest > tolerances().positivity) {
      positive.push_back(s);
    } else {
      report.hypotheses.warnings.push_back("a non-trivial solution touches zero on the interior");
    }
  }
  if (positive.empty()) throw Error(ErrorCode::OnlyTrivialFound, "no positive solution was found");
  report.solutions = std::move(positive);
  report.hypotheses.negative_part_norm_sq = neg_sq;
  return report;
}

PsCertificate ps_boundedness_diagnostic(const ProblemSpec& spec, const std::vector<VertexFn>& trajectory) {
  const auto beta = spec.f.ar_beta();
  const auto r0 = spec.f.ar_r0();
  if (!beta || !r0) throw Error(ErrorCode::InvalidArgument, "the PS diagnostic needs AR parameters");
  PsCertificate cert;
  cert.a = 0.5 - 1.0 / *beta;
  cert.K = ps_constant(spec, *beta, *r0);
  for (const auto& u : trajectory) cert.max_iterate_norm = std::max(cert.max_iterate_norm, alpha_norm(spec, u));
  if (!(cert.a > 1e-12)) {
    cert.usable = false;
    cert.radius = kInf;
    return cert;
  }
  const AlphaFactor fac(spec.alpha_matrix);
  const double lam = spec.lambda;
  cert.usable = true;
  for (const auto& u : trajectory) {
    const double J = energy(spec, u);
    const Eigen::VectorXd r = to_interior(*spec.dom, energy_gradient(spec, u).riesz);
    const Eigen::VectorXd g = spec.interior_mu.cwiseProduct(r);
    const double dual = std::sqrt(std::max(0.0, g.dot(fac.solve(g))));
    const double b = lam / *beta * dual;
    const double c = lam * std::abs(J) + lam / *beta * cert.K * spec.dom->volume();
    const double radius = (b + std::sqrt(b * b + 4.0 * cert.a * c)) / (2.0 * cert.a);
    cert.radii.push_back(radius);
    cert.radius = std::max(cert.radius, radius);
  }
  return cert;
}

}  // namespace graphell
