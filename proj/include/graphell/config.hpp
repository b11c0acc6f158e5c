#pragma once

#include <cstddef>

namespace graphell {

/// Numerical tolerances shared across modules. Everything that compares
/// floating-point quantities against a threshold reads it from here.
struct Tolerances {
  double identity_rel = 1e-12;         // Green identity, stiffness consistency
  double eigen_residual = 1e-10;       // ||L u - lambda M u||_inf
  double lambda_mp_agreement = 1e-9;   // lambda_{1,2} vs lambda_1
  double solution_residual = 1e-10;    // classical residual, scaled by 1 + ||u||_inf
  double distinct_sup = 1e-6;          // two solutions are distinct above this
  double deflation_shift = 1e-8;       // tau in the deflation factor
  double levenberg_sigma = 1e-10;      // Jacobian considered singular below this
  double levenberg_shift = 1e-8;
  double ball_margin = 1e-8;           // relative interior margin for B_rho
  double golden_section = 1e-10;       // z tolerance for the lambda* search
  double bracket = 1e-10;              // root bracketing for non-polynomial terms
  double slope_regularization = 1e-10; // epsilon for |.|^{p-2} with p < 2
  double positivity = 1e-10;           // strict positivity margin on the interior
  std::size_t dense_limit = 512;       // dense factorizations up to this size
};

inline const Tolerances& tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace graphell
