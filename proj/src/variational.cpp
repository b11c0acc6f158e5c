#include "graphell/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SparseCholesky>

#include "graphell/calculus.hpp"
#include "graphell/config.hpp"
#include "graphell/error.hpp"
#include "graphell/spectral.hpp"

namespace graphell {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> all_vertices(const DomainDecomp& dom) {
  std::vector<std::size_t> v(dom.size());
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void require_fn(const DomainDecomp& dom, const VertexFn& u) {
  if (u.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "function size mismatch");
}

void require_dirichlet(const DomainDecomp& dom, const VertexFn& u) {
  require_fn(dom, u);
  if (!is_dirichlet_class(dom, u)) {
    throw Error(ErrorCode::InvalidArgument, "function must vanish on the boundary");
  }
}

void require_regime(const ProblemSpec& spec) {
  if (spec.alpha.regime == AlphaRegime::Invalid) {
    throw Error(ErrorCode::InvalidAlphaRegime, "alpha satisfies neither admissible condition");
  }
}

double weighted_alpha_mass(const ProblemSpec& spec, const VertexFn& u, const VertexFn& v) {
  double s = 0.0;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) s += spec.dom->mu(x) * spec.alpha.alpha[x] * u[x] * v[x];
  return s;
}

}  // namespace

std::string_view to_string(AlphaRegime r) noexcept {
  switch (r) {
    case AlphaRegime::NonPositive: return "NonPositive";
    case AlphaRegime::SmallL1: return "SmallL1";
    case AlphaRegime::ConstantBelowLambda1: return "ConstantBelowLambda1";
    case AlphaRegime::Invalid: return "Invalid";
  }
  return "Invalid";
}

LinearCoefficient classify_alpha(const DomainDecomp& dom, std::vector<double> alpha, double lambda1,
                                bool allow_constant) {
  if (alpha.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "alpha has the wrong length");
  LinearCoefficient a;
  for (std::size_t x = 0; x < dom.size(); ++x) {
    if (!std::isfinite(alpha[x])) throw Error(ErrorCode::InvalidArgument, "alpha must be finite");
    a.l1 += dom.mu(x) * std::abs(alpha[x]);
  }
  const bool nonpositive = std::all_of(alpha.begin(), alpha.end(), [](double v) { return v <= 0.0; });
  const bool constant = std::all_of(alpha.begin(), alpha.end(), [&](double v) { return v == alpha.front(); });
  if (nonpositive) {
    a.regime = AlphaRegime::NonPositive;
  } else if (a.l1 < dom.mu0() * dom.mu0() * lambda1) {
    a.regime = AlphaRegime::SmallL1;
  } else if (allow_constant && constant && alpha.front() < lambda1) {
    a.regime = AlphaRegime::ConstantBelowLambda1;
  } else {
    a.regime = AlphaRegime::Invalid;
  }
  a.alpha = std::move(alpha);
  return a;
}

ProblemSpec make_spec(const DomainDecomp& dom, std::vector<double> alpha, Nonlinearity f, double lambda,
                      bool allow_constant_alpha) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  f.check_size(dom.size());
  ProblemSpec s;
  s.dom = &dom;
  s.lambda1 = lambda1(dom).lambda1;
  s.alpha = classify_alpha(dom, std::move(alpha), s.lambda1, allow_constant_alpha);
  s.f = std::move(f);
  s.lambda = lambda;
  s.interior_mu = interior_mass(dom);
  Eigen::VectorXd shift(s.interior_mu.size());
  for (std::size_t k = 0; k < dom.interior().size(); ++k) {
    shift[static_cast<Eigen::Index>(k)] = s.interior_mu[static_cast<Eigen::Index>(k)] * s.alpha.alpha[dom.interior()[k]];
  }
  Eigen::SparseMatrix<double> diag(shift.size(), shift.size());
  diag.setIdentity();
  diag = shift.asDiagonal() * diag;
  s.alpha_matrix = assemble_stiffness(dom).interior - diag;
  return s;
}

ProblemSpec with_lambda(const ProblemSpec& spec, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::InvalidArgument, "lambda must be positive");
  ProblemSpec s = spec;
  s.lambda = lambda;
  return s;
}

ProblemSpec with_nonlinearity(const ProblemSpec& spec, Nonlinearity f) {
  f.check_size(spec.dom->size());
  ProblemSpec s = spec;
  s.f = std::move(f);
  return s;
}

double alpha_norm_sq(const ProblemSpec& spec, const VertexFn& u) {
  require_regime(spec);
  require_dirichlet(*spec.dom, u);
  return std::max(0.0, dirichlet_energy(*spec.dom, u) - weighted_alpha_mass(spec, u, u));
}

double alpha_norm(const ProblemSpec& spec, const VertexFn& u) { return std::sqrt(alpha_norm_sq(spec, u)); }

NormBounds norm_equivalence_bounds(const ProblemSpec& spec) {
  require_regime(spec);
  const double mu0 = spec.dom->mu0();
  const double ratio = spec.alpha.l1 / (mu0 * mu0 * spec.lambda1);
  NormBounds b;
  switch (spec.alpha.regime) {
    case AlphaRegime::NonPositive:
      b.lower = 1.0;
      b.upper = std::sqrt(1.0 + ratio);
      break;
    case AlphaRegime::SmallL1:
      b.lower = std::sqrt(1.0 - ratio);
      b.upper = std::sqrt(2.0);
      break;
    case AlphaRegime::ConstantBelowLambda1: {
      // ||u||^2 - gamma int u^2 lies between (1 - gamma/lambda1) ||u||^2 and ||u||^2.
      const double gamma = spec.alpha.alpha.front();
      b.lower = std::sqrt(1.0 - std::max(0.0, gamma) / spec.lambda1);
      b.upper = 1.0;
      break;
    }
    case AlphaRegime::Invalid: break;
  }
  return b;
}

double kappa(const ProblemSpec& spec) {
  const NormBounds b = norm_equivalence_bounds(spec);
  const double base = 1.0 / (spec.dom->mu0() * std::sqrt(spec.lambda1));
  if (spec.alpha.regime == AlphaRegime::NonPositive) return base;
  return b.lower > 0.0 ? base / b.lower : kInf;
}

double embedding_constant(const DomainDecomp& dom, double lambda1) {
  return 1.0 / (dom.mu0() * std::sqrt(lambda1));
}

double sharp_embedding_constant(const DomainDecomp& dom, double lambda1) {
  return 1.0 / std::sqrt(dom.mu0() * lambda1);
}

EmbeddingResidual sup_norm_embedding_check(const DomainDecomp& dom, const VertexFn& u, double nu,
                                           double lambda1) {
  return sup_norm_embedding_check(dom, u, nu, lambda1, embedding_constant(dom, lambda1));
}

EmbeddingResidual sup_norm_embedding_check(const DomainDecomp& dom, const VertexFn& u, double nu,
                                           double lambda1, double constant) {
  require_dirichlet(dom, u);
  if (!(nu >= 1.0)) throw Error(ErrorCode::InvalidArgument, "nu must be at least 1");
  const double norm = std::sqrt(dirichlet_energy(dom, u));
  double lnu = 0.0;
  for (std::size_t x = 0; x < dom.size(); ++x) lnu += dom.mu(x) * std::pow(std::abs(u[x]), nu);
  lnu = std::pow(lnu, 1.0 / nu);
  (void)lambda1;
  EmbeddingResidual r;
  r.sup = u.sup_norm() - constant * norm;
  r.lnu = lnu - std::pow(dom.volume(), 1.0 / nu) * constant * norm;
  return r;
}

double energy(const ProblemSpec& spec, const VertexFn& u) {
  const double q = alpha_norm_sq(spec, u);
  double pot = 0.0;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) pot += spec.dom->mu(x) * spec.f.F(x, u[x]);
  return q / (2.0 * spec.lambda) - pot;
}

EnergyGradient energy_gradient(const ProblemSpec& spec, const VertexFn& u) {
  require_regime(spec);
  require_dirichlet(*spec.dom, u);
  const VertexFn lap = laplacian(*spec.dom, u);
  EnergyGradient g;
  g.riesz = VertexFn(spec.dom->size());
  for (std::size_t x : spec.dom->interior()) {
    g.riesz[x] = (-lap[x] - spec.alpha.alpha[x] * u[x]) / spec.lambda - spec.f.f(x, u[x]);
  }
  return g;
}

double energy_derivative(const ProblemSpec& spec, const VertexFn& u, const VertexFn& v) {
  require_regime(spec);
  require_dirichlet(*spec.dom, u);
  require_dirichlet(*spec.dom, v);
  double nonlinear = 0.0;
  for (std::size_t x = 0; x < spec.dom->size(); ++x) nonlinear += spec.dom->mu(x) * spec.f.f(x, u[x]) * v[x];
  return (dirichlet_product(*spec.dom, u, v) - weighted_alpha_mass(spec, u, v)) / spec.lambda - nonlinear;
}

Eigen::VectorXd classical_residual(const ProblemSpec& spec, const VertexFn& u) {
  require_dirichlet(*spec.dom, u);
  const auto& in = spec.dom->interior();
  Eigen::VectorXd r(static_cast<Eigen::Index>(in.size()));
  for (std::size_t k = 0; k < in.size(); ++k) {
    const std::size_t x = in[k];
    r[static_cast<Eigen::Index>(k)] =
        -laplacian(*spec.dom, u, x) - spec.alpha.alpha[x] * u[x] - spec.lambda * spec.f.f(x, u[x]);
  }
  return r;
}

double classical_residual_max(const ProblemSpec& spec, const VertexFn& u) {
  const Eigen::VectorXd r = classical_residual(spec, u);
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

double weak_residual(const ProblemSpec& spec, const VertexFn& u) {
  const Eigen::VectorXd g = spec.interior_mu.cwiseProduct(classical_residual(spec, u));
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(assemble_stiffness(*spec.dom).interior);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "stiffness factorization failed");
  return std::sqrt(std::max(0.0, g.dot(ldlt.solve(g))));
}

ResidualConstants weak_classical_constants(const ProblemSpec& spec) {
  const DomainDecomp& dom = *spec.dom;
  ResidualConstants c;
  c.upper = dom.volume() * sharp_embedding_constant(dom, spec.lambda1);
  for (std::size_t x : dom.interior()) {
    c.lower = std::max(c.lower, std::sqrt(dom.degree_in_domain(x)) / dom.mu(x));
  }
  return c;
}

ArCheck check_ar(const DomainDecomp& dom, const Nonlinearity& f, double beta, double r0, const ArGrid& grid,
                 bool one_sided) {
  if (!(beta > 2.0)) throw Error(ErrorCode::InvalidArgument, "AR exponent beta must exceed 2");
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "AR radius r0 must be positive");
  if (!(grid.t_max >= r0) || grid.points < 1) throw Error(ErrorCode::InvalidArgument, "AR grid must cover [r0, T]");
  f.check_size(dom.size());
  ArCheck out;
  out.one_sided = one_sided;
  const std::vector<int> signs = one_sided ? std::vector<int>{1} : std::vector<int>{1, -1};
  for (std::size_t x = 0; x < dom.size() && out.pass; ++x) {
    for (int sign : signs) {
      for (std::size_t i = 0; i < grid.points; ++i) {
        const double mag = grid.points == 1 ? r0 : r0 + (grid.t_max - r0) * static_cast<double>(i) /
                                                            static_cast<double>(grid.points - 1);
        const double t = sign * mag;
        const double tf = t * f.f(x, t);
        const double bF = beta * f.F(x, t);
        ++out.samples;
        const bool ok = bF > 0.0 && tf >= bF - 1e-12 * std::max(1.0, std::abs(bF));
        if (!ok) {
          out.pass = false;
          out.witness_vertex = x;
          out.witness_t = t;
          out.reason = bF > 0.0 ? "t f(x,t) < beta F(x,t)" : "F(x,t) <= 0";
          break;
        }
      }
      if (!out.pass) break;
    }
  }

  out.asymptotic_pass = true;
  for (std::size_t x = 0; x < dom.size() && out.asymptotic_pass; ++x) {
    for (int sign : signs) {
      const HalfLinePoly F = f.potential_on(x, sign);
      if (F.terms.empty() || F.terms.back().second <= 0.0) {
        out.asymptotic_pass = false;
        break;
      }
      // t f - beta F = sum (e - beta) c sigma^e; its top nonzero term decides.
      for (auto it = F.terms.rbegin(); it != F.terms.rend(); ++it) {
        const double d = (it->first - beta) * it->second;
        if (d == 0.0) continue;
        if (d < 0.0) out.asymptotic_pass = false;
        break;
      }
      if (!out.asymptotic_pass) break;
    }
  }
  return out;
}

SuperquadraticBounds superquadratic_bounds(const DomainDecomp& dom, const Nonlinearity& f, double beta, double r0,
                                           bool one_sided) {
  if (!(beta > 2.0) || !(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "need beta > 2 and r0 > 0");
  f.check_size(dom.size());
  SuperquadraticBounds b;
  b.b1 = kInf;
  b.b2 = -kInf;
  const double rb = std::pow(r0, beta);
  for (std::size_t x = 0; x < dom.size(); ++x) {
    const double fpos = f.F(x, r0);
    const double m = (one_sided ? fpos : std::min(fpos, f.F(x, -r0))) / rb;
    const std::size_t v[1] = {x};
    const double Mt = f.max_abs_potential(v, r0).value;
    b.b1 = std::min(b.b1, m);
    b.b2 = std::max(b.b2, Mt + m * rb);
  }
  return b;
}

double lambda_admissible(const ProblemSpec& spec, double rho) {
  if (!(rho > 0.0)) throw Error(ErrorCode::InvalidArgument, "rho must be positive");
  const double z = kappa(spec) * std::sqrt(rho);
  const double G = spec.f.max_abs_potential(all_vertices(*spec.dom), z).value;
  if (G == 0.0) return kInf;
  return rho / (2.0 * G);
}

double potential_quotient_sup(const Nonlinearity& f, std::span<const std::size_t> vertices, double power) {
  double e_min = kInf;
  double e_max = -kInf;
  for (std::size_t x : vertices) {
    for (int sign : {1, -1}) {
      for (const auto& [e, c] : f.potential_on(x, sign).terms) {
        if (c == 0.0) continue;
        e_min = std::min(e_min, e);
        e_max = std::max(e_max, e);
      }
    }
  }
  // Degenerate cases: z^power / G(z) is unbounded near 0 or near infinity.
  if (!std::isfinite(e_min) || e_min > power || e_max < power) return kInf;

  auto quotient = [&](double logz) {
    const double z = std::exp(logz);
    const double G = f.max_abs_potential(vertices, z).value;
    return G == 0.0 ? kInf : std::pow(z, power) / G;
  };
  constexpr int kSteps = 1600;
  const double lo = std::log(1e-8);
  const double hi = std::log(1e8);
  const double h = (hi - lo) / kSteps;
  int best_i = 0;
  double best = -kInf;
  for (int i = 0; i <= kSteps; ++i) {
    const double q = quotient(lo + h * i);
    if (q > best) {
      best = q;
      best_i = i;
    }
  }
  if (!std::isfinite(best)) return kInf;
  // Golden-section refinement on the cells around the best grid point.
  double a = lo + h * std::max(0, best_i - 1);
  double b = lo + h * std::min(kSteps, best_i + 1);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = quotient(c);
  double fd = quotient(d);
  while (b - a > tolerances().golden_section) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = quotient(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = quotient(d);
    }
  }
  return std::max({best, fc, fd});
}

double lambda_star(const ProblemSpec& spec) {
  const double k = kappa(spec);
  const double sup = potential_quotient_sup(spec.f, all_vertices(*spec.dom), 2.0);
  return std::isfinite(sup) ? sup / (k * k) : kInf;
}

F1Check check_f1(const ProblemSpec& spec, double M0, double sigma) {
  if (!(M0 > 0.0) || !(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "M0 and sigma must be positive");
  const DomainDecomp& dom = *spec.dom;
  F1Check c;
  c.max_abs_f = spec.f.max_abs_value(dom.interior(), M0).value;
  c.bound = dom.mu0() * dom.mu0() * M0 * spec.lambda1 / (2.0 * (sigma + 1.0));
  c.pass = c.max_abs_f <= c.bound;
  return c;
}

CorollaryCheck check_corollary(const ProblemSpec& spec) {
  const DomainDecomp& dom = *spec.dom;
  CorollaryCheck c;
  c.max_f = -kInf;
  for (std::size_t x : dom.interior()) {
    for (int sign : {1, -1}) {
      c.max_f = std::max(c.max_f, max_on_interval(spec.f.value_on(x, sign), 1.0).first);
    }
  }
  c.condition = dom.mu0() > 2.0 * std::sqrt(std::max(0.0, c.max_f) / spec.lambda1);
  c.f1 = check_f1(spec, 1.0, 1.0);
  return c;
}

F1lCheck check_f1l(const DomainDecomp& dom, const Nonlinearity& f, double lambda1) {
  f.check_size(dom.size());
  F1lCheck out;
  out.limit = -kInf;
  for (std::size_t x : dom.interior()) {
    // f(x,t)/t near 0+ as a sum of c t^e.
    HalfLinePoly ratio;
    for (const auto& t : f.terms()) {
      const double e = t.kind == Term::Kind::IntegerPower ? t.k - 1.0 : t.q - 2.0;
      ratio.terms.emplace_back(e, t.c.at(x));
    }
    ratio.compact();
    double lim = 0.0;
    if (!ratio.terms.empty()) {
      const auto [e, c] = ratio.terms.front();
      if (e < 0.0) {
        lim = c > 0.0 ? kInf : -kInf;
      } else if (e == 0.0) {
        lim = c;
      }
    }
    out.limit = std::max(out.limit, lim);
  }
  if (dom.interior().empty()) out.limit = 0.0;
  for (double t : {1e-2, 1e-4, 1e-6, 1e-8}) {
    double r = -kInf;
    for (std::size_t x : dom.interior()) r = std::max(r, f.f(x, t) / t);
    out.samples.emplace_back(t, r);
  }
  out.pass = out.limit < lambda1;
  return out;
}

std::optional<double> unboundedness_witness(const ProblemSpec& spec, const VertexFn& u0, double threshold,
                                            double t_max) {
  for (double t = 1.0; t <= t_max; t *= 2.0) {
    VertexFn v(u0.values() * t);
    if (energy(spec, v) < -threshold) return t;
  }
  return std::nullopt;
}

}  // namespace graphell
