#include <doctest.h>

#include <cmath>
#include <random>

#include "graphell/error.hpp"
#include "graphell/nonlinearity.hpp"
#include "support.hpp"

using namespace graphell;
using doctest::Approx;

TEST_CASE("terms, potentials and derivatives") {
  const Nonlinearity f = Nonlinearity::power(1.0, 0) + Nonlinearity::power(1.0, 3);
  CHECK(f.f(0, 2.0) == 9.0);
  CHECK(f.F(0, 2.0) == Approx(6.0));
  CHECK(f.F(0, -2.0) == Approx(2.0));
  CHECK(f.df(0, 2.0) == Approx(12.0));
  const Nonlinearity s = Nonlinearity::signed_power(1.0, 3.0);
  CHECK(s.f(0, -2.0) == Approx(-4.0));
  CHECK(s.F(0, -2.0) == Approx(8.0 / 3.0));
  CHECK(s.df(0, -2.0) == Approx(4.0));
  const Nonlinearity t = s.positive_part();
  CHECK(t.f(0, -2.0) == 0.0);
  CHECK(t.F(0, -2.0) == 0.0);
  CHECK(t.f(0, 2.0) == Approx(4.0));
  CHECK(f.scaled(2.0).F(0, 1.0) == Approx(2.5));
}

TEST_CASE("potentials integrate f") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> c(-2, 2), q(2.0, 5.0), tt(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    const Nonlinearity f = Nonlinearity::power(c(rng), static_cast<int>(trial % 5)) +
                           Nonlinearity::signed_power(c(rng), q(rng));
    const double t = tt(rng);
    // Composite Simpson on [0, t].
    const int n = 2000;
    double s = f.f(0, 0) + f.f(0, t);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f.f(0, t * i / n);
    s *= t / (3.0 * n);
    CHECK(f.F(0, t) == Approx(s).epsilon(1e-7));
    const double h = 1e-6;
    CHECK(f.df(0, t) == Approx((f.f(0, t + h) - f.f(0, t - h)) / (2 * h)).epsilon(1e-5));
  }
}

TEST_CASE("signed power potential near q = 1") {
  for (double q : {1.05, 1.2, 1.5}) {
    const Nonlinearity f = Nonlinearity::signed_power(1.3, q);
    for (double t : {-2.0, -0.3, 0.0, 0.7, 3.0}) CHECK(f.F(0, t) == Approx(1.3 * std::pow(std::abs(t), q) / q));
  }
}

TEST_CASE("validation") {
  bool bad = false;
  try {
    Nonlinearity::signed_power(1.0, 1.0);
  } catch (const Error& e) {
    bad = e.code() == ErrorCode::InvalidArgument;
  }
  CHECK(bad);
  Term t;
  t.c.per_vertex = {1, 2};
  Nonlinearity f({t});
  bool mismatch = false;
  try {
    f.check_size(3);
  } catch (const Error& e) {
    mismatch = e.code() == ErrorCode::DomainMismatch;
  }
  CHECK(mismatch);
}

TEST_CASE("max of |F| over a ball") {
  const Nonlinearity f = Nonlinearity::power(1.0, 0) + Nonlinearity::power(1.0, 3);
  const std::size_t v[1] = {0};
  // F(s) = s + s^4/4: on |s| <= 1 the max of |F| is F(1) = 1.25.
  const Extremum e = f.max_abs_potential(v, 1.0);
  CHECK(e.value == Approx(1.25));
  CHECK(e.at == Approx(1.0));
  // |F| on |s| <= 0.5 is attained at s = 0.5 as well; F(-1) = -0.75 is interior only for z >= 1.
  CHECK(f.max_abs_potential(v, 0.5).value == Approx(0.5 + 0.015625));
  // f = 1 has |F| = |s|; ties at +-z resolve to the smallest |s| (equal), then positive.
  const Extremum one = Nonlinearity::power(1.0, 0).max_abs_potential(v, 2.0);
  CHECK(one.value == Approx(2.0));
  CHECK(one.at == Approx(2.0));
  // Interior critical point: F(s) = s^2/2 - s^4/4 has max 1/4 at s = 1 on |s| <= 1.2.
  const Nonlinearity g = Nonlinearity::power(1.0, 1) + Nonlinearity::power(-1.0, 3);
  const Extremum ge = g.max_abs_potential(v, 1.2);
  CHECK(ge.value == Approx(std::max(0.25, std::abs(0.72 - 1.2 * 1.2 * 1.2 * 1.2 / 4))));
}

TEST_CASE("max_abs_potential agrees with a dense sampling oracle") {
  std::mt19937_64 rng(52);
  std::uniform_real_distribution<double> c(-2, 2), q(2.2, 4.5), z(0.1, 4);
  const std::size_t v[1] = {0};
  for (int trial = 0; trial < 100; ++trial) {
    Nonlinearity f = Nonlinearity::power(c(rng), 0) + Nonlinearity::power(c(rng), 1) +
                     Nonlinearity::power(c(rng), 2) + Nonlinearity::power(c(rng), 3);
    if (trial % 2) f = f + Nonlinearity::signed_power(c(rng), q(rng));
    const double zz = z(rng);
    const double ref = oracle::max_abs_on([&](double s) { return f.F(0, s); }, zz);
    CHECK(f.max_abs_potential(v, zz).value == Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("real polynomial roots") {
  // (t - 1)(t^2 + t - 1) = t^3 - 2t + 1
  auto r = real_polynomial_roots({1, -2, 0, 1});
  REQUIRE(r.size() == 3);
  CHECK(r[0] == Approx((-1 - std::sqrt(5.0)) / 2).epsilon(1e-14));
  CHECK(r[1] == Approx((std::sqrt(5.0) - 1) / 2).epsilon(1e-14));
  CHECK(r[2] == Approx(1.0).epsilon(1e-14));
  CHECK(real_polynomial_roots({1, 0, 1}).empty());
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> c(-3, 3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(static_cast<std::size_t>(2 + t % 5));
    for (auto& x : p) x = c(rng);
    const auto mine = real_polynomial_roots(p);
    const auto ref = oracle::real_roots(p);
    REQUIRE(mine.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(mine[i] - ref[i]) <= 1e-8 * (1 + std::abs(ref[i])));
  }
}

TEST_CASE("critical points for non-integer exponents") {
  // g(s) = s^2.5 - s on [0, 2]: critical point at (1/2.5)^(1/1.5).
  HalfLinePoly g{{{2.5, 1.0}, {1.0, -1.0}}};
  const auto cps = critical_points(g, 2.0);
  const double expected = std::pow(0.4, 1.0 / 1.5);
  bool found = false;
  for (double s : cps) found = found || std::abs(s - expected) <= 1e-9;
  CHECK(found);
  const auto [val, at] = max_abs_on_interval(g, 2.0);
  CHECK(at == Approx(2.0));
  CHECK(val == Approx(std::pow(2.0, 2.5) - 2.0));
}
