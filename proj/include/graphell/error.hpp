#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphell {

enum class ErrorCode {
  ParseError,
  NonPositiveMeasure,
  NegativeWeight,
  AsymmetricWeight,
  SelfLoop,
  UnknownVertex,
  EmptyInterior,
  EmptyBoundary,
  DisconnectedDomain,
  BoundaryDesignation,
  DomainMismatch,
  VertexOutsideDomain,
  ZeroFunction,
  TrivialConstraintClass,
  NonConvergence,
  InvalidAlphaRegime,
  ZeroDenominator,
  NoInteriorMinimizer,
  OnlyTrivialFound,
  NegativePartNonzero,
  HypothesisViolated,
  ZeroSlopeSingularity,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// CLI maps them onto its exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graphell
