#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace graphell {

/// A smooth functional on R^n whose critical points are wanted. The gradient
/// G is the residual map; hessian is its Jacobian.
struct CriticalProblem {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd&)> energy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  /// True once c is accepted as a solution (the caller's residual test).
  std::function<bool(const Eigen::VectorXd&)> accept;
  /// Distance used for distinctness (sup norm of the vertex function).
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> distance;
};

/// One Newton step direction -J^{-1} G, shifting J when it is near singular.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& J, const Eigen::VectorXd& G);

struct PolishResult {
  Eigen::VectorXd x;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Damped Newton on the gradient without deflation.
PolishResult newton_polish(const CriticalProblem& prob, Eigen::VectorXd x, std::size_t max_iter = 50);

struct DeflationOptions {
  std::size_t budget = 64;
  std::uint64_t seed = 0;
  std::size_t round = 8;  // starts per parallel round
  std::size_t max_iter = 100;
  double shift = 1e-8;  // tau in 1/(|c - c*|^2 + tau) + 1
  double distinct = 1e-6;
};

struct DeflationTrace {
  std::size_t restarts = 0;
  std::size_t iterations = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;
  std::size_t duplicates = 0;
  std::size_t deflations = 0;  // roots deflated against, summed over runs
};

struct DeflationResult {
  std::vector<Eigen::VectorXd> roots;  // discovery order
  DeflationTrace trace;
};

/// Deflated Newton from budget starts. Starts run in rounds; every start in a
/// round deflates the roots known when the round began, and the round's
/// candidates are merged in start order, so the result does not depend on
/// the thread count. `start(k, rng)` produces start k.
DeflationResult deflated_search(const CriticalProblem& prob,
                                const std::function<Eigen::VectorXd(std::size_t, std::mt19937_64&)>& start,
                                std::vector<Eigen::VectorXd> known, const DeflationOptions& options);

}  // namespace graphell
