#include "graphell/higher_order.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "graphell/calculus.hpp"
#include "graphell/error.hpp"

namespace graphell {

VertexFn iterated_laplacian(const DomainDecomp& dom, const VertexFn& u, std::size_t order) {
  if (u.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "function size mismatch");
  VertexFn v = u;
  for (std::size_t l = 0; l < order; ++l) v = laplacian(dom, v);
  return v;
}

VertexFn higher_slope(const DomainDecomp& dom, const VertexFn& u, std::size_t k) {
  if (k % 2 == 1) return slope(dom, iterated_laplacian(dom, u, (k - 1) / 2));
  VertexFn v = iterated_laplacian(dom, u, k / 2);
  v.values() = v.values().cwiseAbs();
  return v;
}

double wmp_norm(const DomainDecomp& dom, const VertexFn& u, std::size_t m, double p) {
  const VertexFn g = higher_slope(dom, u, m);
  double sum = 0.0;
  for (std::size_t x = 0; x < dom.size(); ++x) sum += dom.mu(x) * std::pow(g[x], p);
  return std::pow(sum, 1.0 / p);
}

double mp_operator_weak(const DomainDecomp& dom, const VertexFn& u, const VertexFn& v,
                        std::size_t m, double p) {
  if (v.size() != dom.size()) throw Error(ErrorCode::DomainMismatch, "function size mismatch");
  const VertexFn g = higher_slope(dom, u, m);
  if (p < 2.0) {
    for (std::size_t x = 0; x < dom.size(); ++x) {
      if (g[x] == 0.0) {
        throw Error(ErrorCode::ZeroSlopeSingularity, "|grad^m u| vanishes at '" + dom.id(x) + "'");
      }
    }
  }
  const std::size_t inner = m / 2;
  const VertexFn su = iterated_laplacian(dom, u, inner);
  const VertexFn sv = iterated_laplacian(dom, v, inner);
  double sum = 0.0;
  if (m % 2 == 1) {
    const VertexFn gamma = gradient_form(dom, su, sv);
    for (std::size_t x = 0; x < dom.size(); ++x) sum += dom.mu(x) * std::pow(g[x], p - 2.0) * gamma[x];
  } else {
    for (std::size_t x = 0; x < dom.size(); ++x) sum += dom.mu(x) * std::pow(g[x], p - 2.0) * su[x] * sv[x];
  }
  return sum;
}

Eigen::SparseMatrix<double> laplacian_matrix(const DomainDecomp& dom) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t x = 0; x < dom.size(); ++x) {
    const auto r = static_cast<Eigen::Index>(x);
    double diag = 0.0;
    for (const auto& n : dom.neighbors(x)) {
      t.emplace_back(r, static_cast<Eigen::Index>(n.index), n.weight / dom.mu(x));
      diag += n.weight;
    }
    t.emplace_back(r, r, -diag / dom.mu(x));
  }
  const auto n = static_cast<Eigen::Index>(dom.size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::SparseMatrix<double> dirichlet_form_matrix(const DomainDecomp& dom) {
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t x = 0; x < dom.size(); ++x) {
    const auto r = static_cast<Eigen::Index>(x);
    double diag = 0.0;
    for (const auto& n : dom.neighbors(x)) {
      t.emplace_back(r, static_cast<Eigen::Index>(n.index), -n.weight);
      diag += n.weight;
    }
    t.emplace_back(r, r, diag);
  }
  const auto n = static_cast<Eigen::Index>(dom.size());
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd constraint_basis(const DomainDecomp& dom, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "order m must be positive");
  const auto n = static_cast<Eigen::Index>(dom.size());
  if (m == 1) {
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(dom.interior().size()));
    for (std::size_t k = 0; k < dom.interior().size(); ++k) {
      basis(static_cast<Eigen::Index>(dom.interior()[k]), static_cast<Eigen::Index>(k)) = 1.0;
    }
    return basis;
  }

  const Eigen::MatrixXd lap = Eigen::MatrixXd(laplacian_matrix(dom));
  std::vector<Eigen::RowVectorXd> rows;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t j = 0; j < m; ++j) {
    if (j > 0 && j % 2 == 0) power = lap * power;
    for (std::size_t x : dom.boundary()) {
      const auto xi = static_cast<Eigen::Index>(x);
      if (j % 2 == 0) {
        rows.push_back(power.row(xi));
      } else {
        for (const auto& nb : dom.neighbors(x)) {
          rows.push_back(power.row(static_cast<Eigen::Index>(nb.index)) - power.row(xi));
        }
      }
    }
  }
  Eigen::MatrixXd C(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) C.row(static_cast<Eigen::Index>(r)) = rows[r];

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  if (rank >= n) {
    throw Error(ErrorCode::TrivialConstraintClass,
                "boundary conditions up to order " + std::to_string(m - 1) + " force u = 0");
  }
  Eigen::MatrixXd basis = svd.matrixV().rightCols(n - rank);
  // Boundary rows are zero in exact arithmetic.
  for (std::size_t x : dom.boundary()) basis.row(static_cast<Eigen::Index>(x)).setZero();
  return basis;
}

MpFunctional::MpFunctional(const DomainDecomp& dom, std::size_t m, double p, double eps)
    : dom_(&dom), m_(m), p_(p), eps_(eps) {
  if (m == 0) throw Error(ErrorCode::InvalidArgument, "order m must be positive");
  if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "exponent p must exceed 1");
  const auto n = static_cast<Eigen::Index>(dom.size());
  const Eigen::MatrixXd lap = Eigen::MatrixXd(laplacian_matrix(dom));
  inner_ = Eigen::MatrixXd::Identity(n, n);
  for (std::size_t i = 0; i < m / 2; ++i) inner_ = lap * inner_;
  mu_.resize(n);
  for (std::size_t x = 0; x < dom.size(); ++x) mu_[static_cast<Eigen::Index>(x)] = dom.mu(x);
}

double MpFunctional::power(double s2, double e) const {
  return std::pow(s2 + eps_ * eps_, e);
}

Eigen::VectorXd MpFunctional::squared_slope(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd y = inner_ * u;
  if (m_ % 2 == 0) return y.cwiseAbs2();
  Eigen::VectorXd s2(y.size());
  for (std::size_t x = 0; x < dom_->size(); ++x) {
    double acc = 0.0;
    for (const auto& nb : dom_->neighbors(x)) {
      const double d = y[static_cast<Eigen::Index>(nb.index)] - y[static_cast<Eigen::Index>(x)];
      acc += nb.weight * d * d;
    }
    s2[static_cast<Eigen::Index>(x)] = acc / (2.0 * dom_->mu(x));
  }
  return s2;
}

double MpFunctional::value(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd s2 = squared_slope(u);
  double sum = 0.0;
  for (Eigen::Index x = 0; x < s2.size(); ++x) sum += mu_[x] * power(s2[x], 0.5 * p_);
  return sum;
}

Eigen::VectorXd MpFunctional::gradient(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd y = inner_ * u;
  const Eigen::VectorXd s2 = squared_slope(u);
  const double e = 0.5 * p_;
  Eigen::VectorXd gy = Eigen::VectorXd::Zero(y.size());
  for (std::size_t xs = 0; xs < dom_->size(); ++xs) {
    const auto x = static_cast<Eigen::Index>(xs);
    if (s2[x] == 0.0 && eps_ == 0.0) continue;  // zero derivative for p >= 2 (p < 2 needs eps)
    const double c = e * power(s2[x], e - 1.0);
    if (m_ % 2 == 0) {
      gy[x] += mu_[x] * c * 2.0 * y[x];
    } else {
      for (const auto& nb : dom_->neighbors(xs)) {
        const auto z = static_cast<Eigen::Index>(nb.index);
        const double a = c * nb.weight * (y[x] - y[z]);
        gy[x] += a;
        gy[z] -= a;
      }
    }
  }
  return inner_.transpose() * gy;
}

Eigen::MatrixXd MpFunctional::hessian(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd y = inner_ * u;
  const Eigen::VectorXd s2 = squared_slope(u);
  const double e = 0.5 * p_;
  const auto n = y.size();
  Eigen::MatrixXd hy = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t xs = 0; xs < dom_->size(); ++xs) {
    const auto x = static_cast<Eigen::Index>(xs);
    const double base = s2[x] + eps_ * eps_;
    if (base == 0.0) {
      // Only p = 2 has a nonzero second derivative at zero slope.
      if (p_ != 2.0) continue;
    }
    const double d1 = e * std::pow(base, e - 1.0);
    const double d2 = (e == 1.0 || base == 0.0) ? 0.0 : e * (e - 1.0) * std::pow(base, e - 2.0);
    if (m_ % 2 == 0) {
      // d/dy of mu * (y^2 + eps^2)^e
      hy(x, x) += mu_[x] * (2.0 * d1 + 4.0 * d2 * y[x] * y[x]);
    } else {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      for (const auto& nb : dom_->neighbors(xs)) {
        const auto z = static_cast<Eigen::Index>(nb.index);
        const double diff = nb.weight * (y[x] - y[z]);
        a[x] += diff;
        a[z] -= diff;
        hy(x, x) += d1 * nb.weight;
        hy(z, z) += d1 * nb.weight;
        hy(x, z) -= d1 * nb.weight;
        hy(z, x) -= d1 * nb.weight;
      }
      if (d2 != 0.0) hy += (d2 / mu_[x]) * a * a.transpose();
    }
  }
  return inner_.transpose() * hy * inner_;
}

double lp_mass(const DomainDecomp& dom, const Eigen::VectorXd& u, double p, double eps) {
  double sum = 0.0;
  for (std::size_t x = 0; x < dom.size(); ++x) {
    const double v = u[static_cast<Eigen::Index>(x)];
    sum += dom.mu(x) * std::pow(v * v + eps * eps, 0.5 * p);
  }
  return sum;
}

Eigen::VectorXd lp_mass_gradient(const DomainDecomp& dom, const Eigen::VectorXd& u, double p, double eps) {
  Eigen::VectorXd g(u.size());
  for (std::size_t x = 0; x < dom.size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    const double base = u[i] * u[i] + eps * eps;
    g[i] = base == 0.0 ? 0.0 : dom.mu(x) * p * std::pow(base, 0.5 * p - 1.0) * u[i];
  }
  return g;
}

}  // namespace graphell
