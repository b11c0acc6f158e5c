#include "graphell/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "graphell/error.hpp"

namespace graphell {

namespace {

double ipow(double t, int k) {
  double r = 1.0;
  double b = t;
  for (unsigned e = static_cast<unsigned>(k); e != 0; e >>= 1) {
    if (e & 1U) r *= b;
    b *= b;
  }
  return r;
}

double polyval(const std::vector<double>& c, double s) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * s + c[i];
  return r;
}

}  // namespace

double HalfLinePoly::operator()(double s) const {
  double r = 0.0;
  for (const auto& [e, c] : terms) r += c * (e == 0.0 ? 1.0 : std::pow(s, e));
  return r;
}

HalfLinePoly HalfLinePoly::derivative() const {
  HalfLinePoly d;
  for (const auto& [e, c] : terms) {
    if (e != 0.0 && c != 0.0) d.terms.emplace_back(e - 1.0, e * c);
  }
  d.compact();
  return d;
}

bool HalfLinePoly::integer_exponents() const {
  return std::all_of(terms.begin(), terms.end(),
                     [](const auto& t) { return t.first >= 0.0 && t.first == std::floor(t.first); });
}

void HalfLinePoly::compact() {
  std::sort(terms.begin(), terms.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  terms = std::move(merged);
}

std::vector<double> real_polynomial_roots(std::vector<double> coeffs) {
  double scale = 0.0;
  for (double c : coeffs) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return {};
  while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-14 * scale) coeffs.pop_back();
  std::vector<double> roots;
  std::size_t low = 0;
  while (low < coeffs.size() && coeffs[low] == 0.0) ++low;
  if (low > 0) {
    roots.push_back(0.0);
    coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(low));
  }
  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
  } else {
    const auto d = static_cast<Eigen::Index>(deg);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) comp(i, d - 1) = -coeffs[static_cast<std::size_t>(i)] / coeffs[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    std::vector<double> dcoef(deg);
    for (std::size_t i = 1; i <= deg; ++i) dcoef[i - 1] = static_cast<double>(i) * coeffs[i];
    for (Eigen::Index i = 0; i < d; ++i) {
      const auto z = es.eigenvalues()[i];
      if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z.real()))) continue;
      double r = z.real();
      for (int it = 0; it < 8; ++it) {
        const double dp = polyval(dcoef, r);
        if (dp == 0.0) break;
        const double step = polyval(coeffs, r) / dp;
        if (!std::isfinite(step)) break;
        r -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(r))) break;
      }
      roots.push_back(r);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }),
              roots.end());
  return roots;
}

std::vector<double> critical_points(const HalfLinePoly& g, double z) {
  std::vector<double> cand{0.0};
  const HalfLinePoly dg = g.derivative();
  if (z > 0.0 && !dg.terms.empty()) {
    if (dg.integer_exponents()) {
      std::vector<double> c;
      for (const auto& [e, coef] : dg.terms) {
        const auto i = static_cast<std::size_t>(e);
        if (c.size() <= i) c.resize(i + 1, 0.0);
        c[i] += coef;
      }
      for (double r : real_polynomial_roots(c)) {
        if (r > 0.0 && r < z) cand.push_back(r);
      }
    } else {
      // Sign changes of g' on a uniform grid, refined by bisection.
      constexpr int kGrid = 4096;
      double prev_s = z / kGrid;
      double prev = dg(prev_s);
      for (int i = 2; i < kGrid; ++i) {
        const double s = z * i / kGrid;
        const double v = dg(s);
        if (prev == 0.0) cand.push_back(prev_s);
        if ((prev < 0.0) != (v < 0.0) && prev != 0.0 && v != 0.0) {
          double a = prev_s;
          double b = s;
          double fa = prev;
          for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + b); ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = dg(mid);
            if ((fm < 0.0) == (fa < 0.0)) {
              a = mid;
              fa = fm;
            } else {
              b = mid;
            }
          }
          cand.push_back(0.5 * (a + b));
        }
        prev_s = s;
        prev = v;
      }
    }
  }
  if (z > 0.0) cand.push_back(z);
  std::sort(cand.begin(), cand.end());
  return cand;
}

namespace {

template <class Map>
std::pair<double, double> best_candidate(const HalfLinePoly& g, double z, Map map) {
  double best = 0.0;
  double arg = 0.0;
  bool first = true;
  for (double s : critical_points(g, z)) {
    const double v = map(g(s));
    if (first || v > best + 1e-14 * std::abs(best)) {
      first = false;
      best = v;
      arg = s;
    }
  }
  return {best, arg};
}

}  // namespace

std::pair<double, double> max_abs_on_interval(const HalfLinePoly& g, double z) {
  return best_candidate(g, z, [](double v) { return std::abs(v); });
}

std::pair<double, double> max_on_interval(const HalfLinePoly& g, double z) {
  return best_candidate(g, z, [](double v) { return v; });
}

Nonlinearity::Nonlinearity(std::vector<Term> terms, std::optional<double> ar_beta, std::optional<double> ar_r0)
    : terms_(std::move(terms)), ar_beta_(ar_beta), ar_r0_(ar_r0) {
  for (const auto& t : terms_) {
    if (t.kind == Term::Kind::IntegerPower && t.k < 0) {
      throw Error(ErrorCode::InvalidArgument, "integer power must be nonnegative");
    }
    if (t.kind == Term::Kind::SignedPower && !(t.q > 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "signed power needs q > 1");
    }
  }
  if (ar_beta_ && ar_r0_) set_ar(*ar_beta_, *ar_r0_);
}

Nonlinearity Nonlinearity::power(double c, int k) {
  Term t;
  t.c.scalar = c;
  t.kind = Term::Kind::IntegerPower;
  t.k = k;
  return Nonlinearity({t});
}

Nonlinearity Nonlinearity::signed_power(double c, double q) {
  Term t;
  t.c.scalar = c;
  t.kind = Term::Kind::SignedPower;
  t.q = q;
  return Nonlinearity({t});
}

Nonlinearity Nonlinearity::operator+(const Nonlinearity& other) const {
  Nonlinearity r = *this;
  r.terms_.insert(r.terms_.end(), other.terms_.begin(), other.terms_.end());
  return r;
}

void Nonlinearity::set_ar(double beta, double r0) {
  if (!(r0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "AR radius r0 must be positive");
  if (!std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "AR exponent must be finite");
  ar_beta_ = beta;
  ar_r0_ = r0;
}

double Nonlinearity::f(std::size_t x, double t) const {
  if (truncate_ && t < 0.0) return 0.0;
  double r = 0.0;
  for (const auto& term : terms_) {
    const double c = term.c.at(x);
    if (term.kind == Term::Kind::IntegerPower) {
      r += c * ipow(t, term.k);
    } else if (t != 0.0) {
      r += c * std::pow(std::abs(t), term.q - 2.0) * t;
    }
  }
  return r;
}

double Nonlinearity::F(std::size_t x, double t) const {
  if (truncate_ && t < 0.0) return 0.0;
  double r = 0.0;
  for (const auto& term : terms_) {
    const double c = term.c.at(x);
    if (term.kind == Term::Kind::IntegerPower) {
      r += c * ipow(t, term.k + 1) / (term.k + 1);
    } else {
      r += c * std::pow(std::abs(t), term.q) / term.q;
    }
  }
  return r;
}

double Nonlinearity::df(std::size_t x, double t) const {
  if (truncate_ && t < 0.0) return 0.0;
  double r = 0.0;
  for (const auto& term : terms_) {
    const double c = term.c.at(x);
    if (term.kind == Term::Kind::IntegerPower) {
      if (term.k > 0) r += c * term.k * ipow(t, term.k - 1);
    } else if (t != 0.0) {
      r += c * (term.q - 1.0) * std::pow(std::abs(t), term.q - 2.0);
    } else if (term.q == 2.0) {
      r += c;
    }
  }
  return r;
}

Nonlinearity Nonlinearity::scaled(double c) const {
  Nonlinearity r = *this;
  for (auto& t : r.terms_) {
    t.c.scalar *= c;
    for (double& v : t.c.per_vertex) v *= c;
  }
  return r;
}

Nonlinearity Nonlinearity::positive_part() const {
  Nonlinearity r = *this;
  r.truncate_ = true;
  return r;
}

bool Nonlinearity::is_zero(std::span<const std::size_t> vertices) const {
  for (const auto& t : terms_) {
    for (std::size_t x : vertices) {
      if (t.c.at(x) != 0.0) return false;
    }
  }
  return true;
}

bool Nonlinearity::vanishes_at_origin(std::span<const std::size_t> vertices) const {
  for (std::size_t x : vertices) {
    if (f(x, 0.0) != 0.0) return false;
  }
  return true;
}

HalfLinePoly Nonlinearity::potential_on(std::size_t x, int sign) const {
  HalfLinePoly g;
  if (truncate_ && sign < 0) return g;
  for (const auto& t : terms_) {
    const double c = t.c.at(x);
    if (t.kind == Term::Kind::IntegerPower) {
      const double sg = ((t.k + 1) % 2 == 1 && sign < 0) ? -1.0 : 1.0;
      g.terms.emplace_back(static_cast<double>(t.k + 1), sg * c / (t.k + 1));
    } else {
      g.terms.emplace_back(t.q, c / t.q);
    }
  }
  g.compact();
  return g;
}

HalfLinePoly Nonlinearity::value_on(std::size_t x, int sign) const {
  HalfLinePoly g;
  if (truncate_ && sign < 0) return g;
  for (const auto& t : terms_) {
    const double c = t.c.at(x);
    if (t.kind == Term::Kind::IntegerPower) {
      const double sg = (t.k % 2 == 1 && sign < 0) ? -1.0 : 1.0;
      g.terms.emplace_back(static_cast<double>(t.k), sg * c);
    } else {
      g.terms.emplace_back(t.q - 1.0, sign < 0 ? -c : c);
    }
  }
  g.compact();
  return g;
}

namespace {

template <class Getter>
Extremum max_over(std::span<const std::size_t> vertices, double z, Getter get) {
  Extremum best;
  best.value = -1.0;
  for (std::size_t x : vertices) {
    for (int sign : {1, -1}) {
      const auto [v, s] = max_abs_on_interval(get(x, sign), z);
      const bool better = v > best.value * (1.0 + 1e-14) ||
                          (v >= best.value * (1.0 - 1e-14) && s < std::abs(best.at) * (1.0 - 1e-14));
      if (better) {
        best.value = v;
        best.at = sign * s;
        best.vertex = x;
      }
    }
  }
  if (best.value < 0.0) best.value = 0.0;
  return best;
}

}  // namespace

Extremum Nonlinearity::max_abs_potential(std::span<const std::size_t> vertices, double z) const {
  return max_over(vertices, z, [this](std::size_t x, int sign) { return potential_on(x, sign); });
}

Extremum Nonlinearity::max_abs_value(std::span<const std::size_t> vertices, double z) const {
  return max_over(vertices, z, [this](std::size_t x, int sign) { return value_on(x, sign); });
}

void Nonlinearity::check_size(std::size_t n) const {
  for (const auto& t : terms_) {
    if (!t.c.per_vertex.empty() && t.c.per_vertex.size() != n) {
      throw Error(ErrorCode::DomainMismatch, "per-vertex coefficient has the wrong length");
    }
  }
}

}  // namespace graphell
