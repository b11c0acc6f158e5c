#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "graphell/error.hpp"

namespace graphell {

struct CommandResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// 0 success, 2 parse, 3 domain, 4 constraint class, 5 nonconvergence, 1 other.
int exit_code_for(ErrorCode code) noexcept;

CommandResult cmd_info(const std::string& graph_file);
CommandResult cmd_lambda1(const std::string& graph_file);
CommandResult cmd_lambda_mp(const std::string& graph_file, std::size_t m, double p, std::uint64_t seed = 0);

struct SolveArgs {
  std::string graph_file;
  std::string problem_file;  // may be empty with yamabe
  std::uint64_t seed = 0;
  std::size_t budget = 64;
  bool mountain_pass = false;
  bool truncate = false;
  std::optional<std::pair<double, double>> yamabe;  // (gamma, p)
};
CommandResult cmd_solve(const SolveArgs& args);

struct SweepArgs {
  std::string graph_file;
  std::string problem_file;
  std::string grid;  // a:b:n
  std::uint64_t seed = 0;
  std::size_t budget = 64;
};
CommandResult cmd_sweep(const SweepArgs& args);

struct VerifyArgs {
  std::string graph_file;
  std::string problem_file;
  std::optional<double> beta;
  std::optional<double> r0;
};
CommandResult cmd_verify(const VerifyArgs& args);

}  // namespace graphell
