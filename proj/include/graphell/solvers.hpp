#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "graphell/graph.hpp"
#include "graphell/variational.hpp"

namespace graphell {

enum class SignProfile { Positive, NonNegative, NonPositive, Negative, Signed, Zero };
std::string_view to_string(SignProfile s) noexcept;
/// Sign pattern on the interior.
SignProfile sign_profile(const DomainDecomp& dom, const VertexFn& u);

struct Solution {
  VertexFn u;
  double energy = 0.0;
  double classical_residual_max = 0.0;
  double alpha_norm_sq = 0.0;
  std::optional<bool> in_ball;
  SignProfile sign = SignProfile::Zero;
  bool trivial = false;
};

/// Which hypotheses were machine-checked, and how they came out.
struct Hypotheses {
  std::string alpha_regime;
  bool explicit_boundary = false;
  bool f_vanishes_at_origin = false;
  std::optional<bool> ar_sampled;
  std::optional<bool> ar_asymptotic;
  std::optional<bool> ar_one_sided;
  std::optional<double> ar_beta;
  std::optional<double> ar_r0;
  std::optional<bool> f1l;
  std::optional<double> f1l_limit;
  bool lambda_below_star = false;
  bool lambda_below_half_star = false;
  std::optional<double> rho;
  std::optional<double> lambda_admissible_bound;  // Lambda(rho)
  std::optional<bool> lambda_in_admissible_interval;
  std::optional<double> ps_radius;
  std::optional<double> gamma;
  std::optional<double> negative_part_norm_sq;
  std::vector<std::string> warnings;
};

struct SolverTrace {
  std::string mode;
  std::size_t restarts = 0;
  std::size_t iterations = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;
  std::size_t duplicates = 0;
  std::size_t deflations = 0;
  double start_radius = 0.0;
};

struct SolveReport {
  std::vector<Solution> solutions;  // sorted by energy, ties by interior max
  double lambda_used = 0.0;
  double lambda_star = 0.0;
  Hypotheses hypotheses;
  SolverTrace trace;
  std::uint64_t seed = 0;
  /// For higher-order solves.
  std::optional<std::size_t> order_m;
  std::optional<double> order_p;
  std::optional<double> lambda_mp;
};

enum class SolveMode { Deflate, MountainPass };

struct SolveOptions {
  std::uint64_t seed = 0;
  std::size_t budget = 64;
  std::optional<double> rho;
  SolveMode mode = SolveMode::Deflate;
};

/// Critical point of J inside the alpha-norm ball of radius sqrt(rho):
/// projected preconditioned descent from 0, then a Newton polish. Throws
/// NoInteriorMinimizer when the descent ends on the sphere.
Solution minimize_in_ball(const ProblemSpec& spec, double rho);

/// All distinct critical points found by deflated Newton (or the
/// mountain-pass cross-check in that mode).
SolveReport find_all_solutions(const ProblemSpec& spec, const SolveOptions& options = {});

/// Non-negative solution through the f_+ truncation, with lambda = 1.
SolveReport solve_truncated(const ProblemSpec& spec, const SolveOptions& options = {});

/// Positive solutions of -Lap u = gamma u + (u^+)^{p-1}.
SolveReport yamabe_solve(const DomainDecomp& dom, double gamma, double p, const SolveOptions& options = {});

struct PsCertificate {
  bool usable = false;
  double a = 0.0;       // 1/2 - 1/beta
  double K = 0.0;       // max_{x, |t| <= r0} (beta F - t f)^+
  double radius = 0.0;  // bound on ||u_k||_alpha over the trajectory
  double max_iterate_norm = 0.0;
  std::vector<double> radii;  // per iterate
};

/// A-priori radius for iterates from the Palais-Smale estimate:
/// a ||u||^2 <= lambda |J| + (lambda/beta) ||J'|| ||u|| + (lambda/beta) K mu(D).
PsCertificate ps_boundedness_diagnostic(const ProblemSpec& spec, const std::vector<VertexFn>& trajectory);

/// Builds a Solution record (energy, residual, norm, sign).
Solution describe_solution(const ProblemSpec& spec, const VertexFn& u, std::optional<double> rho);

/// Sorts by energy, then by the interior maximum.
void sort_solutions(std::vector<Solution>& s);

}  // namespace graphell
