// Acceptance run: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "graphell/calculus.hpp"
#include "graphell/commands.hpp"
#include "graphell/error.hpp"
#include "graphell/higher_order.hpp"
#include "graphell/parallel.hpp"
#include "graphell/solvers.hpp"
#include "graphell/spectral.hpp"
#include "graphell/variational.hpp"
#include "support.hpp"

using namespace graphell;

namespace {

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note = what;
    pass = pass && ok;
  }
};

double seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Nonlinearity cubic_plus_one() { return Nonlinearity::power(1.0, 0) + Nonlinearity::power(1.0, 3); }

std::string data(const char* name) { return std::string(GRAPHELL_TEST_DATA) + "/" + name; }

VertexFn random_fn(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  VertexFn u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = d(rng);
  return u;
}

VertexFn random_dirichlet(const DomainDecomp& dom, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  VertexFn u(dom.size());
  for (std::size_t x : dom.interior()) u[x] = d(rng);
  return u;
}

std::vector<fixtures::Fixture> shipped() { return {fixtures::p3(), fixtures::p5(), fixtures::s4()}; }

Outcome spectral_exactness() {
  Outcome o;
  double l3 = 0, l4 = 0, l5 = 0;
  const auto p3 = fixtures::p3();
  const auto s4 = fixtures::s4();
  const auto p5 = fixtures::p5();
  const double t3 = seconds([&] { l3 = lambda1(*p3.dom).lambda1; });
  const double t4 = seconds([&] { l4 = lambda1(*s4.dom).lambda1; });
  const double t5 = seconds([&] { l5 = lambda1(*p5.dom).lambda1; });
  o.require(l3 == 2.0, "lambda1(P3) != 2");
  o.require(l4 == 3.0, "lambda1(S4) != 3");
  o.require(std::abs(l5 - oracle::dense_lambda1(p5.raw)) <= 1e-10, "lambda1(P5) off the oracle");
  o.require(std::abs(l5 - (2.0 - std::sqrt(2.0))) <= 1e-10, "lambda1(P5) != 2 - sqrt 2");
  o.require(t3 < 0.1 && t4 < 0.1 && t5 < 0.1, "runtime");
  return o;
}

Outcome green_identity() {
  Outcome o;
  std::mt19937_64 rng(1001);
  for (int t = 0; t < 1000; ++t) {
    const auto fx = fixtures::random_fixture(rng, 12);
    const VertexFn u = random_fn(fx.dom->size(), rng);
    const VertexFn v = random_dirichlet(*fx.dom, rng);
    // ||.|| is the Dirichlet norm.
    const double scale = 1 + std::sqrt(dirichlet_energy(*fx.dom, u) * dirichlet_energy(*fx.dom, v));
    o.require(check_parts_identity(*fx.dom, u, v) <= 1e-12 * scale, "residual above 1e-12");
  }
  return o;
}

Outcome embedding() {
  Outcome o;
  std::mt19937_64 rng(1002);
  for (const auto& fx : shipped()) {
    const double l1 = lambda1(*fx.dom).lambda1;
    for (int k = 0; k < 1000; ++k) {
      const VertexFn u = random_dirichlet(*fx.dom, rng, 2.0);
      for (double nu : {1.0, 2.0, 4.0}) {
        const EmbeddingResidual r = sup_norm_embedding_check(*fx.dom, u, nu, l1);
        o.require(r.sup <= 1e-12 && r.lnu <= 1e-12, "negative slack");
      }
    }
  }
  const auto p3 = fixtures::p3();
  const EmbeddingResidual tight = sup_norm_embedding_check(*p3.dom, VertexFn{0, 1, 0}, 2.0, 2.0);
  o.require(std::abs(tight.sup) <= 1e-15, "no equality on P3");
  return o;
}

Outcome gradient_check() {
  Outcome o;
  std::mt19937_64 rng(1003);
  const std::vector<Nonlinearity> families{
      cubic_plus_one(),
      Nonlinearity::signed_power(1.0, 3.0),
      Nonlinearity::signed_power(-0.7, 2.5) + Nonlinearity::power(0.3, 2),
      Nonlinearity::power(0.5, 1) + Nonlinearity::signed_power(1.0, 4.2),
      Nonlinearity::power(1.0, 3).positive_part(),
  };
  for (const auto& fx : shipped()) {
    const DomainDecomp& dom = *fx.dom;
    for (const auto& f : families) {
      const ProblemSpec spec = make_spec(dom, std::vector<double>(dom.size(), -0.25), f, 0.8);
      for (int k = 0; k < 500; ++k) {
        const VertexFn u = random_dirichlet(dom, rng), v = random_dirichlet(dom, rng);
        const EnergyGradient g = energy_gradient(spec, u);
        double pair = 0.0;
        for (std::size_t x : dom.interior()) pair += dom.mu(x) * g.riesz[x] * v[x];
        const double fd = oracle::central_difference(
            [&](double h) { return energy(spec, VertexFn(Eigen::VectorXd(u.values() + h * v.values()))); }, 1e-6);
        o.require(std::abs(pair - fd) <= 1e-6 * (1 + std::abs(fd)), "relative error above 1e-6");
      }
    }
  }
  return o;
}

Outcome multiplicity() {
  Outcome o;
  const auto p3 = fixtures::p3();
  const Nonlinearity f = cubic_plus_one();
  SolveReport r;
  double ls = 0.0;
  const double t = seconds([&] {
    const ProblemSpec spec = make_spec(*p3.dom, {0, 0, 0}, f, 1.0);
    ls = lambda_star(spec);
    SolveOptions opt;
    opt.rho = 1.0;
    r = find_all_solutions(spec, opt);
  });
  const double oracle_ls = oracle::lambda_star_1d([&](double s) { return f.F(0, s); }, 1.0 / std::sqrt(2.0));
  o.require(std::abs(ls - oracle_ls) <= 1e-8, "lambda* off the 1-D oracle");
  o.require(std::abs(ls - 4.0 / 3.0 * std::cbrt(2.0)) <= 1e-8, "lambda* != (4/3) 2^(1/3)");
  o.require(1.0 < ls, "lambda = 1 not below lambda*");
  const std::vector<double> roots{(-1 - std::sqrt(5.0)) / 2, (std::sqrt(5.0) - 1) / 2, 1.0};
  o.require(r.solutions.size() == 3, "solution count != 3");
  if (r.solutions.size() == 3) {
    std::vector<double> got;
    for (const auto& s : r.solutions) got.push_back(s.u[1]);
    std::sort(got.begin(), got.end());
    for (std::size_t i = 0; i < 3; ++i) o.require(std::abs(got[i] - roots[i]) <= 1e-8, "root mismatch");
  }
  bool in_ball = false;
  for (const auto& s : r.solutions) {
    o.require(!s.trivial, "trivial solution");
    in_ball = in_ball || (s.in_ball.value_or(false) && s.alpha_norm_sq < 1.0);
  }
  o.require(in_ball, "no solution inside the ball");
  o.require(t < 1.0, "runtime");
  return o;
}

Outcome yamabe() {
  Outcome o;
  const auto p3 = fixtures::p3();
  SolveReport r = yamabe_solve(*p3.dom, 0.0, 3.0);
  o.require(r.solutions.size() == 1 && std::abs(r.solutions[0].u[1] - 2.0) <= 1e-10, "P3 (0,3)");
  r = yamabe_solve(*p3.dom, 1.0, 4.0);
  o.require(r.solutions.size() == 1 && std::abs(r.solutions[0].u[1] - 1.0) <= 1e-10, "P3 (1,4)");
  const auto p5 = fixtures::p5();
  r = yamabe_solve(*p5.dom, 0.0, 3.0);
  const auto ref = oracle::yamabe_newton(p5.raw, 0.0, 3.0);
  o.require(ref.size() == 1 && r.solutions.size() == 1, "P5 solution count");
  if (ref.size() == 1 && r.solutions.size() == 1) {
    const Eigen::VectorXd ui = to_interior(*p5.dom, r.solutions[0].u);
    o.require(ui.minCoeff() > 1e-10, "P5 not strictly positive");
    o.require((ui - ref[0]).cwiseAbs().maxCoeff() <= 1e-8, "P5 off the Newton oracle");
  }
  bool rejected = false;
  try {
    yamabe_solve(*p3.dom, 2.0, 3.0);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::HypothesisViolated;
  }
  o.require(rejected, "gamma >= lambda1 accepted");
  return o;
}

Outcome truncation() {
  Outcome o;
  const auto p3 = fixtures::p3();
  const ProblemSpec spec = make_spec(*p3.dom, {0, 0, 0}, Nonlinearity::power(1.0, 3), 1.0);
  const SolveReport r = solve_truncated(spec);
  o.require(!r.solutions.empty(), "no solution");
  if (r.solutions.empty()) return o;
  const Solution& s = r.solutions[0];
  o.require(!s.trivial, "trivial");
  o.require(std::abs(s.u[1] - std::sqrt(2.0)) <= 1e-10, "u(x2) != sqrt 2");
  o.require(s.u.values().minCoeff() >= 0.0, "u- not zero");
  o.require(r.hypotheses.negative_part_norm_sq == std::optional<double>(0.0), "u- energy not zero");
  return o;
}

Outcome completeness() {
  Outcome o;
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> c(-2, 2), lead(0.5, 2);
  std::uniform_int_distribution<int> degree(1, 5);
  const auto p3 = fixtures::p3();
  for (int t = 0; t < 50; ++t) {
    const int deg = degree(rng);
    std::vector<double> coeffs(static_cast<std::size_t>(deg) + 1);
    for (auto& v : coeffs) v = c(rng);
    coeffs.back() = (c(rng) < 0 ? -1 : 1) * lead(rng);
    Nonlinearity f;
    for (int k = 0; k <= deg; ++k) f = f + Nonlinearity::power(coeffs[static_cast<std::size_t>(k)], k);
    std::vector<double> eq(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) eq[i] = -coeffs[i];
    eq[1] += 2.0;  // deg(x2) u / mu(x2) = f(u)
    const auto roots = oracle::real_roots(eq);
    const SolveReport r = find_all_solutions(make_spec(*p3.dom, {0, 0, 0}, f, 1.0));
    std::vector<double> got;
    for (const auto& s : r.solutions) got.push_back(s.u[1]);
    std::sort(got.begin(), got.end());
    bool same = got.size() == roots.size();
    for (std::size_t i = 0; same && i < roots.size(); ++i) same = std::abs(got[i] - roots[i]) <= 1e-8;
    o.require(same, "instance " + std::to_string(t) + " differs from the root oracle");
  }
  return o;
}

Outcome reduction() {
  Outcome o;
  std::mt19937_64 rng(1009);
  const Nonlinearity f = cubic_plus_one();
  std::vector<fixtures::Fixture> all = shipped();
  for (int t = 0; t < 10; ++t) all.push_back(fixtures::random_fixture(rng));
  for (const auto& fx : all) {
    const DomainDecomp& dom = *fx.dom;
    o.require(std::abs(lambda_mp(dom, 1, 2.0).value - lambda1(dom).lambda1) <= 1e-9, "lambda_{1,2} != lambda1");
    const ProblemSpec base = make_spec(dom, std::vector<double>(dom.size(), 0.0), f, 1.0);
    HigherOrderSpec hs;
    hs.dom = &dom;
    hs.f = &f;
    for (int k = 0; k < 50; ++k) {
      const VertexFn u = random_dirichlet(dom, rng);
      const double n = alpha_norm(base, u);
      o.require(std::abs(wmp_norm(dom, u, 1, 2.0) - n) <= 1e-12 * (1 + n), "norm");
      const double e = energy(base, u);
      o.require(std::abs(mp_energy(hs, u) - e) <= 1e-12 * (1 + std::abs(e)), "energy");
    }
  }
  const auto p3 = fixtures::p3();
  HigherOrderSpec hs;
  hs.dom = p3.dom.get();
  hs.f = &f;
  const SolveReport mp = mp_energy_and_solve(hs, SolveOptions{});
  const SolveReport base = find_all_solutions(make_spec(*p3.dom, {0, 0, 0}, f, 1.0));
  bool same = mp.solutions.size() == base.solutions.size();
  for (std::size_t i = 0; same && i < base.solutions.size(); ++i) {
    same = (mp.solutions[i].u.values() - base.solutions[i].u.values()).cwiseAbs().maxCoeff() <= 1e-8;
  }
  o.require(same, "solution sets differ");
  bool trivial = false;
  try {
    hs.m = 2;
    mp_energy_and_solve(hs, SolveOptions{});
  } catch (const Error& e) {
    trivial = e.code() == ErrorCode::TrivialConstraintClass;
  }
  o.require(trivial, "P3 m=2 not rejected");
  return o;
}

Outcome unboundedness() {
  Outcome o;
  struct Case {
    Nonlinearity f;
    double beta, r0;
  };
  const std::vector<Case> cases{{cubic_plus_one(), 3.0, 2.0},
                                {Nonlinearity::signed_power(1.0, 3.0), 3.0, 1.0},
                                {Nonlinearity::signed_power(1.0, 4.0), 4.0, 0.5}};
  int verified = 0;
  for (const auto& fx : shipped()) {
    for (const auto& c : cases) {
      if (!check_ar(*fx.dom, c.f, c.beta, c.r0).pass) continue;
      ++verified;
      const ProblemSpec spec = make_spec(*fx.dom, std::vector<double>(fx.dom->size(), 0.0), c.f, 1.0);
      const VertexFn u0 = from_interior(*fx.dom, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(fx.dom->interior().size())));
      const auto t = unboundedness_witness(spec, u0, 1e6, 1e6);
      o.require(t.has_value() && *t <= 1e6, "no escape below -1e6");
      if (t) o.require(energy(spec, VertexFn(Eigen::VectorXd(*t * u0.values()))) < -1e6, "witness invalid");
    }
  }
  o.require(verified == 9, "AR not verified on every case");
  return o;
}

Outcome determinism() {
  Outcome o;
  SolveArgs a;
  a.graph_file = data("p5.json");
  a.problem_file = data("cubic.json");
  a.seed = 7;
  const CommandResult r1 = cmd_solve(a);
  const CommandResult r2 = cmd_solve(a);
  o.require(r1.exit_code == 0 && r1.out == r2.out, "solve JSON differs");
  SweepArgs s;
  s.graph_file = data("p3.json");
  s.problem_file = data("cubic.json");
  s.grid = "0.2:2.0:10";
  const int saved = parallel::max_threads();
  parallel::set_threads(1);
  const CommandResult one = cmd_sweep(s);
  parallel::set_threads(8);
  const CommandResult eight = cmd_sweep(s);
  parallel::set_threads(saved);
  o.require(one.exit_code == 0 && one.out == eight.out, "sweep CSV differs across thread counts");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"spectral exactness", spectral_exactness},
      {"Green identity", green_identity},
      {"embedding inequalities", embedding},
      {"gradient check", gradient_check},
      {"multiplicity on P3 cubic", multiplicity},
      {"Yamabe positivity", yamabe},
      {"truncation scheme", truncation},
      {"root oracle completeness", completeness},
      {"(m,p) reduction", reduction},
      {"unboundedness below", unboundedness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = e.what();
    }
    std::printf("%s %2zu %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.note.empty() ? "" : ": ",
                o.note.c_str());
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
