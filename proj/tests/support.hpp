#pragma once

// Fixtures and test-only oracles. The oracles work from raw edge lists and
// never call into the library's assembly, spectral or root-finding code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphell/graph.hpp"

namespace fixtures {

using graphell::DomainDecomp;
using graphell::WeightedGraph;

struct RawGraph {
  std::vector<std::string> ids;
  std::vector<double> mu;
  std::vector<WeightedGraph::EdgeInput> edges;
  std::vector<std::string> domain;
  std::optional<std::vector<std::string>> boundary;
};

struct Fixture {
  RawGraph raw;
  std::shared_ptr<DomainDecomp> dom;
};

inline Fixture build(RawGraph raw) {
  auto g = std::make_shared<const WeightedGraph>(raw.ids, raw.mu, raw.edges);
  auto dom = std::make_shared<DomainDecomp>(graphell::decompose_domain(g, raw.domain, raw.boundary));
  return {std::move(raw), std::move(dom)};
}

inline RawGraph path_raw(std::size_t n, const std::string& prefix = "x", double mu = 1.0) {
  RawGraph r;
  for (std::size_t i = 1; i <= n; ++i) {
    r.ids.push_back(prefix + std::to_string(i));
    r.mu.push_back(mu);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) r.edges.push_back({r.ids[i], r.ids[i + 1], 1.0});
  r.domain = r.ids;
  return r;
}

/// x1 - x2 - x3 with designated endpoints.
inline Fixture p3(double mu = 1.0) {
  RawGraph r = path_raw(3, "x", mu);
  r.boundary = std::vector<std::string>{"x1", "x3"};
  return build(r);
}

inline Fixture p3_measure(std::vector<double> mu) {
  RawGraph r = path_raw(3);
  r.mu = std::move(mu);
  r.boundary = std::vector<std::string>{"x1", "x3"};
  return build(r);
}

/// Middle five vertices of P7: boundary v2, v6; interior v3, v4, v5.
inline Fixture p5() {
  RawGraph r = path_raw(7, "v");
  r.domain.assign(r.ids.begin() + 1, r.ids.end() - 1);
  return build(r);
}

/// P5 with designated endpoints, no ghost vertices.
inline Fixture p5_closed() {
  RawGraph r = path_raw(5, "x");
  r.boundary = std::vector<std::string>{"x1", "x5"};
  return build(r);
}

inline Fixture s4() {
  RawGraph r;
  r.ids = {"c", "l1", "l2", "l3"};
  r.mu = {1, 1, 1, 1};
  r.edges = {{"c", "l1", 1}, {"c", "l2", 1}, {"c", "l3", 1}};
  r.domain = r.ids;
  r.boundary = std::vector<std::string>{"l1", "l2", "l3"};
  return build(r);
}

/// Random connected graph with 4..max_n vertices, random weights and
/// measures. Half the time the domain is closed with a designated boundary,
/// otherwise one or two vertices stay outside.
inline Fixture random_fixture(std::mt19937_64& rng, std::size_t max_n = 12, double mu_lo = 0.2,
                              double mu_hi = 3.0) {
  std::uniform_int_distribution<std::size_t> nd(4, max_n);
  std::uniform_real_distribution<double> wd(0.1, 3.0);
  std::uniform_real_distribution<double> md(mu_lo, mu_hi);
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    const std::size_t n = nd(rng);
    RawGraph r;
    for (std::size_t i = 0; i < n; ++i) {
      r.ids.push_back("g" + std::to_string(i));
      r.mu.push_back(md(rng));
    }
    std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
    auto add = [&](std::size_t a, std::size_t b) {
      if (a == b || has[a][b]) return;
      has[a][b] = has[b][a] = 1;
      r.edges.push_back({r.ids[a], r.ids[b], wd(rng)});
    };
    // Spanning path in a random order keeps the graph connected.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i + 1 < n; ++i) add(order[i], order[i + 1]);
    std::uniform_int_distribution<std::size_t> vd(0, n - 1);
    const std::size_t extra = n / 2;
    for (std::size_t e = 0; e < extra; ++e) add(vd(rng), vd(rng));

    if (coin(rng)) {
      r.domain = r.ids;
      std::vector<std::string> b;
      for (std::size_t i = 0; i < n; ++i) {
        if (coin(rng)) b.push_back(r.ids[i]);
      }
      if (b.empty() || b.size() == n) continue;
      r.boundary = b;
    } else {
      // Drop a tail of the spanning path; the rest stays connected.
      const std::size_t drop = 1 + (n > 6 ? vd(rng) % 2 : 0);
      for (std::size_t i = 0; i + drop < n; ++i) r.domain.push_back(r.ids[order[i]]);
    }
    try {
      return build(r);
    } catch (const std::exception&) {
      continue;  // e.g. every domain vertex touches the outside
    }
  }
}

}  // namespace fixtures

namespace oracle {

using fixtures::RawGraph;

/// Domain data rebuilt from the raw document: local order follows the
/// graph's vertex order, like the library, so vectors can be compared.
struct RawDomain {
  std::vector<std::size_t> members;  // graph indices, ascending
  std::vector<double> mu;
  std::vector<char> boundary;
  Eigen::MatrixXd W;  // weights among members
};

inline RawDomain raw_domain(const RawGraph& r) {
  RawDomain d;
  std::vector<char> in(r.ids.size(), 0);
  auto idx = [&](const std::string& id) {
    return static_cast<std::size_t>(std::find(r.ids.begin(), r.ids.end(), id) - r.ids.begin());
  };
  for (const auto& id : r.domain) in[idx(id)] = 1;
  std::vector<std::size_t> local(r.ids.size(), 0);
  for (std::size_t i = 0; i < r.ids.size(); ++i) {
    if (in[i]) {
      local[i] = d.members.size();
      d.members.push_back(i);
      d.mu.push_back(r.mu[i]);
    }
  }
  const std::size_t n = d.members.size();
  d.W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  d.boundary.assign(n, 0);
  for (const auto& e : r.edges) {
    const std::size_t a = idx(e.a), b = idx(e.b);
    if (e.w <= 0) continue;
    if (in[a] && in[b]) {
      d.W(static_cast<Eigen::Index>(local[a]), static_cast<Eigen::Index>(local[b])) = e.w;
      d.W(static_cast<Eigen::Index>(local[b]), static_cast<Eigen::Index>(local[a])) = e.w;
    } else if (in[a]) {
      d.boundary[local[a]] = 1;
    } else if (in[b]) {
      d.boundary[local[b]] = 1;
    }
  }
  if (r.boundary) {
    std::fill(d.boundary.begin(), d.boundary.end(), 0);
    for (const auto& id : *r.boundary) d.boundary[local[idx(id)]] = 1;
  }
  return d;
}

/// Smallest eigenvalue of K_II u = lambda M_II u from the raw weights.
inline double dense_lambda1(const RawGraph& r) {
  const RawDomain d = raw_domain(r);
  std::vector<Eigen::Index> I;
  for (std::size_t x = 0; x < d.mu.size(); ++x) {
    if (!d.boundary[x]) I.push_back(static_cast<Eigen::Index>(x));
  }
  const auto m = static_cast<Eigen::Index>(I.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    A(a, a) = d.W.row(I[static_cast<std::size_t>(a)]).sum();
    for (Eigen::Index b = 0; b < m; ++b) {
      if (a != b) A(a, b) = -d.W(I[static_cast<std::size_t>(a)], I[static_cast<std::size_t>(b)]);
    }
  }
  // Symmetric scaling M^{-1/2} A M^{-1/2}.
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      A(a, b) /= std::sqrt(d.mu[static_cast<std::size_t>(I[static_cast<std::size_t>(a)])] *
                           d.mu[static_cast<std::size_t>(I[static_cast<std::size_t>(b)])]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Laplacian at every domain vertex from the raw weights (sums inside D).
inline Eigen::VectorXd laplacian(const RawDomain& d, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index x = 0; x < u.size(); ++x) {
    double s = 0.0;
    for (Eigen::Index y = 0; y < u.size(); ++y) s += d.W(x, y) * (u[y] - u[x]);
    out[x] = s / d.mu[static_cast<std::size_t>(x)];
  }
  return out;
}

/// Integral of Gamma(u,v): (1/2) sum_x sum_y w (u(y)-u(x))(v(y)-v(x)).
inline double dirichlet(const RawDomain& d, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index x = 0; x < u.size(); ++x) {
    for (Eigen::Index y = 0; y < u.size(); ++y) s += 0.5 * d.W(x, y) * (u[y] - u[x]) * (v[y] - v[x]);
  }
  return s;
}

// Polynomials, coefficients low to high.
using Poly = std::vector<double>;

inline double eval(const Poly& p, double x) {
  double s = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) s = s * x + *it;
  return s;
}

inline Poly derivative(const Poly& p) {
  Poly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(static_cast<double>(i) * p[i]);
  return d;
}

inline Poly trimmed(Poly p) {
  while (!p.empty() && p.back() == 0.0) p.pop_back();
  return p;
}

/// Real roots by recursive isolation between the critical points and
/// bisection; tangential roots are taken from the critical points.
inline std::vector<double> real_roots(Poly p) {
  p = trimmed(std::move(p));
  if (p.size() <= 1) return {};
  if (p.size() == 2) return {-p[0] / p[1]};
  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) bound = std::max(bound, std::abs(p[i] / p.back()));
  bound += 1.0;
  std::vector<double> pts{-bound};
  for (double c : real_roots(derivative(p))) {
    if (c > -bound && c < bound) pts.push_back(c);
  }
  pts.push_back(bound);
  std::sort(pts.begin(), pts.end());
  std::vector<double> roots;
  double scale = 0.0;
  for (double c : p) scale = std::max(scale, std::abs(c));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    double fa = eval(p, a), fb = eval(p, b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if ((fa < 0) == (fb < 0)) continue;
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      const double fm = eval(p, m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  // Double roots at critical points.
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    if (std::abs(eval(p, pts[i])) <= 1e-12 * scale) roots.push_back(pts[i]);
  }
  if (std::abs(eval(p, bound)) == 0.0) roots.push_back(bound);
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || std::abs(r - out.back()) > 1e-9 * (1.0 + std::abs(r))) out.push_back(r);
  }
  return out;
}

/// Golden-section maximum of a unimodal g on [a, b].
inline double golden_max(const std::function<double(double)>& g, double a, double b, double tol = 1e-13) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double gc = g(c), gd = g(d);
  while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
    if (gc < gd) {
      a = c;
      c = d;
      gc = gd;
      d = a + r * (b - a);
      gd = g(d);
    } else {
      b = d;
      d = c;
      gd = gc;
      c = b - r * (b - a);
      gc = g(c);
    }
  }
  return std::max(gc, gd);
}

/// max_{|s| <= z} |F(s)| by dense sampling refined with golden section.
inline double max_abs_on(const std::function<double(double)>& F, double z, int samples = 2001) {
  auto g = [&](double s) { return std::abs(F(s)); };
  int best = 0;
  double bv = -1.0;
  for (int i = 0; i < samples; ++i) {
    const double s = -z + 2.0 * z * i / (samples - 1);
    const double v = g(s);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  const double h = 2.0 * z / (samples - 1);
  const double s0 = -z + h * best;
  return std::max(bv, golden_max(g, std::max(-z, s0 - h), std::min(z, s0 + h)));
}

/// (1/kappa^2) sup_z z^2 / max_{|s|<=z} |F(s)| by a log grid and golden section.
inline double lambda_star_1d(const std::function<double(double)>& F, double kappa) {
  auto q = [&](double lz) {
    const double z = std::exp(lz);
    return z * z / max_abs_on(F, z);
  };
  const int n = 4001;
  const double lo = std::log(1e-6), hi = std::log(1e6);
  int best = 0;
  double bv = -1;
  for (int i = 0; i < n; ++i) {
    const double v = q(lo + (hi - lo) * i / (n - 1));
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  const double h = (hi - lo) / (n - 1);
  const double a = lo + h * std::max(0, best - 1), b = lo + h * std::min(n - 1, best + 1);
  return std::max(bv, golden_max(q, a, b, 1e-14)) / (kappa * kappa);
}

/// Positive solutions of K u = gamma M u + M u^{p-1} on the interior by
/// undamped Newton from a grid of positive starts.
inline std::vector<Eigen::VectorXd> yamabe_newton(const RawGraph& r, double gamma, double p) {
  const RawDomain d = raw_domain(r);
  std::vector<Eigen::Index> I;
  for (std::size_t x = 0; x < d.mu.size(); ++x) {
    if (!d.boundary[x]) I.push_back(static_cast<Eigen::Index>(x));
  }
  const auto m = static_cast<Eigen::Index>(I.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd M(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    M[a] = d.mu[static_cast<std::size_t>(I[static_cast<std::size_t>(a)])];
    K(a, a) = d.W.row(I[static_cast<std::size_t>(a)]).sum();
    for (Eigen::Index b = 0; b < m; ++b) {
      if (a != b) K(a, b) = -d.W(I[static_cast<std::size_t>(a)], I[static_cast<std::size_t>(b)]);
    }
  }
  std::vector<Eigen::VectorXd> found;
  const std::vector<double> levels{0.25, 0.5, 1.0, 2.0, 4.0};
  const auto total = static_cast<std::size_t>(std::pow(levels.size(), static_cast<double>(m)));
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd u(m);
    std::size_t t = k;
    for (Eigen::Index a = 0; a < m; ++a) {
      u[a] = levels[t % levels.size()];
      t /= levels.size();
    }
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd G = K * u - gamma * M.cwiseProduct(u);
      Eigen::MatrixXd J = K;
      for (Eigen::Index a = 0; a < m; ++a) {
        G[a] -= M[a] * std::pow(u[a], p - 1.0);
        J(a, a) -= gamma * M[a] + M[a] * (p - 1.0) * std::pow(u[a], p - 2.0);
      }
      if (G.cwiseAbs().maxCoeff() < 1e-14) {
        ok = true;
        break;
      }
      const Eigen::VectorXd step = J.fullPivLu().solve(G);
      u -= step;
      if (!u.allFinite() || (u.array() <= 0).any()) break;
      if (step.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + u.cwiseAbs().maxCoeff())) {
        ok = true;
        break;
      }
    }
    if (!ok || (u.array() <= 1e-8).any()) continue;
    bool dup = false;
    for (const auto& v : found) dup = dup || (v - u).cwiseAbs().maxCoeff() < 1e-8;
    if (!dup) found.push_back(u);
  }
  return found;
}

/// Central difference of a scalar function along a direction.
inline double central_difference(const std::function<double(double)>& phi, double h) {
  return (phi(h) - phi(-h)) / (2.0 * h);
}

}  // namespace oracle
