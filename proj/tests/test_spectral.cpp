#include <doctest.h>

#include <cmath>
#include <random>

#include "graphell/calculus.hpp"
#include "graphell/error.hpp"
#include "graphell/higher_order.hpp"
#include "graphell/spectral.hpp"
#include "support.hpp"

using namespace graphell;

TEST_CASE("lambda1 on the small fixtures") {
  CHECK(lambda1(*fixtures::p3().dom).lambda1 == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(lambda1(*fixtures::s4().dom).lambda1 == doctest::Approx(3.0).epsilon(1e-15));
  const auto p5 = fixtures::p5();
  const EigenResult e = lambda1(*p5.dom);
  CHECK(std::abs(e.lambda1 - (2.0 - std::sqrt(2.0))) <= 1e-12);
  CHECK(std::abs(e.lambda1 - oracle::dense_lambda1(p5.raw)) <= 1e-10);
  CHECK(e.residual <= 1e-10);
  CHECK(is_dirichlet_class(*p5.dom, e.eigenfunction));
  CHECK(l2_product(*p5.dom, e.eigenfunction, e.eigenfunction) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.eigenfunction.values().maxCoeff() > 0);
}

TEST_CASE("lambda1 agrees with the raw oracle on random graphs") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 100; ++t) {
    const auto fx = fixtures::random_fixture(rng);
    const EigenResult e = lambda1(*fx.dom);
    CHECK(e.lambda1 > 0.0);
    CHECK(std::abs(e.lambda1 - oracle::dense_lambda1(fx.raw)) <= 1e-10 * (1 + e.lambda1));
    CHECK(e.residual <= 1e-10);
    CHECK(rayleigh_quotient(*fx.dom, e.eigenfunction) == doctest::Approx(e.lambda1).epsilon(1e-10));
  }
}

TEST_CASE("inverse iteration above the dense limit") {
  // Path with 700 interior vertices: lambda1 = 2 - 2 cos(pi / 701).
  auto raw = fixtures::path_raw(702);
  raw.boundary = std::vector<std::string>{raw.ids.front(), raw.ids.back()};
  const auto fx = fixtures::build(raw);
  const EigenResult e = lambda1(*fx.dom);
  CHECK(e.iterative);
  const double pi = std::acos(-1.0);
  CHECK(std::abs(e.lambda1 - (2.0 - 2.0 * std::cos(pi / 701.0))) <= 1e-10);
  CHECK(e.residual <= 1e-10);
}

TEST_CASE("rayleigh quotient") {
  CHECK(rayleigh_quotient(*fixtures::p3().dom, VertexFn{0, 1, 0}) == 2.0);
  CHECK(rayleigh_quotient(*fixtures::p5().dom, VertexFn{0, 1, 1, 1, 0}) == doctest::Approx(2.0 / 3.0));
  bool zero = false;
  try {
    rayleigh_quotient(*fixtures::p3().dom, VertexFn(3));
  } catch (const Error& e) {
    zero = e.code() == ErrorCode::ZeroFunction;
  }
  CHECK(zero);
  std::mt19937_64 rng(42);
  std::normal_distribution<double> d;
  for (int t = 0; t < 20; ++t) {
    const auto fx = fixtures::random_fixture(rng);
    const double l1 = lambda1(*fx.dom).lambda1;
    for (int k = 0; k < 50; ++k) {
      VertexFn u(fx.dom->size());
      for (std::size_t x : fx.dom->interior()) u[x] = d(rng);
      CHECK(rayleigh_quotient(*fx.dom, u) >= l1 - 1e-12);
    }
  }
}

TEST_CASE("lambda_mp") {
  const auto p3 = fixtures::p3();
  CHECK(std::abs(lambda_mp(*p3.dom, 1, 2.0).value - 2.0) <= 1e-9);
  const auto p5 = fixtures::p5();
  const LambdaMpResult r = lambda_mp(*p5.dom, 1, 2.0);
  CHECK(std::abs(r.value - (2.0 - std::sqrt(2.0))) <= 1e-9);
  CHECK_FALSE(r.heuristic);
  bool trivial = false;
  try {
    lambda_mp(*p3.dom, 2, 2.0);
  } catch (const Error& e) {
    trivial = e.code() == ErrorCode::TrivialConstraintClass;
  }
  CHECK(trivial);

  // p != 2: heuristic flag, certificate attains the value.
  const LambdaMpResult h = lambda_mp(*p5.dom, 1, 3.0, 7);
  CHECK(h.heuristic);
  CHECK(std::abs(mp_rayleigh_quotient(*p5.dom, h.certificate, 1, 3.0) - h.value) <= 1e-9 * (1 + h.value));
  // On one interior vertex every admissible u is a multiple of the indicator.
  const LambdaMpResult one = lambda_mp(*p3.dom, 1, 3.0);
  CHECK(std::abs(one.value - mp_rayleigh_quotient(*p3.dom, VertexFn{0, 1, 0}, 1, 3.0)) <= 1e-9);

  // m = 2 on a longer path has a nontrivial class.
  auto raw = fixtures::path_raw(9);
  raw.boundary = std::vector<std::string>{"x1", "x9"};
  const auto p9 = fixtures::build(raw);
  const LambdaMpResult m2 = lambda_mp(*p9.dom, 2, 2.0);
  CHECK(m2.value > 0.0);
  CHECK(std::abs(mp_rayleigh_quotient(*p9.dom, m2.certificate, 2, 2.0) - m2.value) <= 1e-9 * (1 + m2.value));
}

TEST_CASE("lambda_mp at (1,2) equals lambda1 on random fixtures") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 30; ++t) {
    const auto fx = fixtures::random_fixture(rng);
    CHECK(std::abs(lambda_mp(*fx.dom, 1, 2.0).value - lambda1(*fx.dom).lambda1) <= 1e-9);
  }
}
