#include "graphell/newton.hpp"

#include <cmath>
#include <exception>
#include <optional>

#include <Eigen/LU>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "graphell/config.hpp"
#include "graphell/parallel.hpp"

namespace graphell {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

Eigen::VectorXd sparse_solve(const Eigen::MatrixXd& J, const Eigen::VectorXd& rhs, bool& ok) {
  const Eigen::SparseMatrix<double> S = J.sparseView();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(S);
  ok = lu.info() == Eigen::Success;
  if (!ok) return {};
  Eigen::VectorXd x = lu.solve(rhs);
  ok = lu.info() == Eigen::Success && finite(x);
  return x;
}

}  // namespace

Eigen::VectorXd newton_direction(const Eigen::MatrixXd& J, const Eigen::VectorXd& G) {
  const auto& tol = tolerances();
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  const auto n = J.rows();
  if (static_cast<std::size_t>(n) > tol.dense_limit) {
    bool ok = false;
    Eigen::VectorXd d = sparse_solve(J, -G, ok);
    if (ok) return d;
    const Eigen::MatrixXd shifted = J + tol.levenberg_shift * scale * Eigen::MatrixXd::Identity(n, n);
    d = sparse_solve(shifted, -G, ok);
    return ok ? d : Eigen::VectorXd(-G);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
  if (lu.rcond() >= tol.levenberg_sigma) {
    Eigen::VectorXd d = lu.solve(-G);
    if (finite(d)) return d;
  }
  // Levenberg shift for a (near) singular Jacobian.
  Eigen::PartialPivLU<Eigen::MatrixXd> shifted(J + tol.levenberg_shift * scale * Eigen::MatrixXd::Identity(n, n));
  Eigen::VectorXd d = shifted.solve(-G);
  return finite(d) ? d : Eigen::VectorXd(-G);
}

PolishResult newton_polish(const CriticalProblem& prob, Eigen::VectorXd x, std::size_t max_iter) {
  PolishResult r;
  for (; r.iterations < max_iter; ++r.iterations) {
    if (prob.accept(x)) {
      r.converged = true;
      break;
    }
    const Eigen::VectorXd G = prob.gradient(x);
    const double g0 = G.norm();
    const Eigen::VectorXd d = newton_direction(prob.hessian(x), G);
    double t = 1.0;
    Eigen::VectorXd best = x + d;
    double best_norm = prob.gradient(best).norm();
    for (int ls = 0; ls < 30 && !(best_norm < g0); ++ls) {
      t *= 0.5;
      const Eigen::VectorXd trial = x + t * d;
      const double n = prob.gradient(trial).norm();
      if (n < best_norm) {
        best = trial;
        best_norm = n;
      }
    }
    if (!finite(best)) break;
    x = best;
  }
  if (!r.converged) r.converged = prob.accept(x);
  r.x = std::move(x);
  return r;
}

namespace {

struct RunOutcome {
  std::optional<Eigen::VectorXd> root;
  std::size_t iterations = 0;
  bool failed = false;
};

RunOutcome deflated_run(const CriticalProblem& prob, Eigen::VectorXd x, const std::vector<Eigen::VectorXd>& known,
                        const DeflationOptions& opt) {
  RunOutcome out;
  auto factor = [&](const Eigen::VectorXd& y) {
    double m = 1.0;
    for (const auto& r : known) m *= 1.0 / ((y - r).squaredNorm() + opt.shift) + 1.0;
    return m;
  };
  for (; out.iterations < opt.max_iter; ++out.iterations) {
    if (!finite(x) || x.norm() > 1e12) {
      out.failed = true;
      return out;
    }
    if (prob.accept(x)) break;
    const Eigen::VectorXd G = prob.gradient(x);
    Eigen::VectorXd d = newton_direction(prob.hessian(x), G);

    // Gradient of log M, M = prod (1/(d_i^2 + tau) + 1).
    Eigen::VectorXd glog = Eigen::VectorXd::Zero(x.size());
    for (const auto& r : known) {
      const Eigen::VectorXd diff = x - r;
      const double q = diff.squaredNorm() + opt.shift;
      const double m = 1.0 / q + 1.0;
      glog += (-2.0 / (q * q * m)) * diff;
    }
    const double den = 1.0 - glog.dot(d);
    if (std::abs(den) > 1e-14) d /= den;

    const double merit0 = factor(x) * G.norm();
    double t = 1.0;
    Eigen::VectorXd next = x + d;
    for (int ls = 0; ls < 20; ++ls) {
      const Eigen::VectorXd trial = x + t * d;
      const double merit = factor(trial) * prob.gradient(trial).norm();
      if (std::isfinite(merit) && merit < (1.0 - 1e-4 * t) * merit0) {
        next = trial;
        break;
      }
      t *= 0.5;
    }
    x = std::move(next);
  }
  if (!finite(x)) {
    out.failed = true;
    return out;
  }
  const PolishResult p = newton_polish(prob, x);
  out.iterations += p.iterations;
  if (p.converged) {
    out.root = p.x;
  } else {
    out.failed = true;
  }
  return out;
}

}  // namespace

DeflationResult deflated_search(const CriticalProblem& prob,
                                const std::function<Eigen::VectorXd(std::size_t, std::mt19937_64&)>& start,
                                std::vector<Eigen::VectorXd> known, const DeflationOptions& options) {
  DeflationResult result;
  result.roots = std::move(known);
  const std::size_t round = std::max<std::size_t>(1, options.round);
  for (std::size_t first = 0; first < options.budget; first += round) {
    const std::size_t count = std::min(round, options.budget - first);
    const std::vector<Eigen::VectorXd> snapshot = result.roots;
    std::vector<RunOutcome> outcomes(count);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
      const std::size_t k = first + static_cast<std::size_t>(i);
      try {
        std::mt19937_64 rng(parallel::task_seed(options.seed, k));
        outcomes[static_cast<std::size_t>(i)] = deflated_run(prob, start(k, rng), snapshot, options);
      } catch (const std::exception&) {
        outcomes[static_cast<std::size_t>(i)].failed = true;
      }
    }
    for (auto& o : outcomes) {
      ++result.trace.restarts;
      result.trace.iterations += o.iterations;
      result.trace.deflations += snapshot.size();
      if (!o.root) {
        ++result.trace.failed;
        continue;
      }
      ++result.trace.converged;
      const Eigen::VectorXd& c = *o.root;
      bool duplicate = false;
      for (auto& r : result.roots) {
        if (prob.distance(c, r) <= options.distinct) {
          duplicate = true;
          if (prob.gradient(c).cwiseAbs().maxCoeff() < prob.gradient(r).cwiseAbs().maxCoeff()) r = c;
          break;
        }
      }
      if (duplicate) {
        ++result.trace.duplicates;
      } else {
        result.roots.push_back(c);
      }
    }
  }
  return result;
}

}  // namespace graphell
