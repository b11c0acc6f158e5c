#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace graphell {

/// Coefficient of one term: a scalar, or one value per vertex of D (local
/// index order).
struct Coefficient {
  double scalar = 0.0;
  std::vector<double> per_vertex;

  double at(std::size_t x) const { return per_vertex.empty() ? scalar : per_vertex.at(x); }
};

/// One term of f(x,t): c(x) t^k (IntegerPower) or c(x) |t|^{q-2} t (SignedPower).
struct Term {
  enum class Kind { IntegerPower, SignedPower };
  Coefficient c;
  Kind kind = Kind::IntegerPower;
  int k = 0;
  double q = 2.0;
};

/// A sum of monomials sigma^e on the half line sigma >= 0.
struct HalfLinePoly {
  std::vector<std::pair<double, double>> terms;  // (exponent, coefficient)

  double operator()(double s) const;
  HalfLinePoly derivative() const;
  bool integer_exponents() const;
  void compact();
};

struct Extremum {
  double value = 0.0;  // the maximum of |g|
  double at = 0.0;     // signed argument s
  std::size_t vertex = 0;
};

/// f(x,t) as a finite term list with closed-form potential and derivative.
/// With truncate set, f and F are replaced by zero for t < 0.
class Nonlinearity {
 public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<Term> terms, std::optional<double> ar_beta = std::nullopt,
                        std::optional<double> ar_r0 = std::nullopt);

  static Nonlinearity power(double c, int k);
  static Nonlinearity signed_power(double c, double q);
  Nonlinearity operator+(const Nonlinearity& other) const;

  const std::vector<Term>& terms() const noexcept { return terms_; }
  std::optional<double> ar_beta() const noexcept { return ar_beta_; }
  std::optional<double> ar_r0() const noexcept { return ar_r0_; }
  void set_ar(double beta, double r0);
  bool truncated() const noexcept { return truncate_; }

  double f(std::size_t x, double t) const;
  double F(std::size_t x, double t) const;
  double df(std::size_t x, double t) const;

  /// f multiplied by c.
  Nonlinearity scaled(double c) const;
  /// The f_+ variant: f for t >= 0, zero below.
  Nonlinearity positive_part() const;

  /// True when every coefficient vanishes on the given vertices.
  bool is_zero(std::span<const std::size_t> vertices) const;
  /// True when f(x,0) = 0 on the given vertices.
  bool vanishes_at_origin(std::span<const std::size_t> vertices) const;

  /// F(x, s) (or f) at vertex x on one half line, s = sign * sigma.
  HalfLinePoly potential_on(std::size_t x, int sign) const;
  HalfLinePoly value_on(std::size_t x, int sign) const;

  /// max over the vertices and |s| <= z of |F(x,s)|; ties go to the smallest |s|.
  Extremum max_abs_potential(std::span<const std::size_t> vertices, double z) const;
  /// max over the vertices and |s| <= z of |f(x,s)|.
  Extremum max_abs_value(std::span<const std::size_t> vertices, double z) const;

  /// Rejects per-vertex coefficients whose length differs from n.
  void check_size(std::size_t n) const;

 private:
  std::vector<Term> terms_;
  std::optional<double> ar_beta_;
  std::optional<double> ar_r0_;
  bool truncate_ = false;
};

/// Real roots of sum_i coeffs[i] s^i (coeffs low to high) via the companion matrix.
std::vector<double> real_polynomial_roots(std::vector<double> coeffs);

/// 0, z and the critical points of g inside (0, z), ascending. Exact
/// polynomial roots for integer exponents, bracketed grid search otherwise.
std::vector<double> critical_points(const HalfLinePoly& g, double z);

/// max of |g| (or of g) on [0, z] as (value, sigma), smallest maximizing sigma.
std::pair<double, double> max_abs_on_interval(const HalfLinePoly& g, double z);
std::pair<double, double> max_on_interval(const HalfLinePoly& g, double z);

}  // namespace graphell
