#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graphell/commands.hpp"
#include "graphell/parallel.hpp"

namespace {

int emit(const graphell::CommandResult& r) {
  std::cout << r.out;
  std::cerr << r.err;
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  graphell::parallel::apply_thread_cap_from_env();

  CLI::App app{"Elliptic problems on weighted graph domains"};
  app.require_subcommand(1);

  std::string graph;
  std::string problem;
  std::uint64_t seed = 0;
  std::size_t budget = 64;

  auto* info = app.add_subcommand("info", "Summarize a graph domain");
  info->add_option("graph", graph, "graph document, - for stdin")->required();

  auto* l1 = app.add_subcommand("lambda1", "First Dirichlet eigenvalue");
  l1->add_option("graph", graph)->required();

  std::size_t m = 1;
  double p = 2.0;
  auto* lmp = app.add_subcommand("lambda-mp", "Higher-order (m,p) eigenvalue");
  lmp->add_option("graph", graph)->required();
  lmp->add_option("--m", m, "order")->capture_default_str();
  lmp->add_option("--p", p, "exponent")->capture_default_str();
  lmp->add_option("--seed", seed)->capture_default_str();

  std::string mode = "deflate";
  bool truncate = false;
  std::vector<double> yamabe;
  auto* solve = app.add_subcommand("solve", "Find solutions of a problem");
  solve->add_option("graph", graph)->required();
  solve->add_option("problem", problem, "problem document (optional with --yamabe)");
  solve->add_option("--seed", seed)->capture_default_str();
  solve->add_option("--budget", budget)->capture_default_str();
  solve->add_option("--mode", mode)->check(CLI::IsMember({"deflate", "mountain-pass"}))->capture_default_str();
  auto* trunc = solve->add_flag("--truncate", truncate, "non-negative solution via f_+");
  solve->add_option("--yamabe", yamabe, "gamma p")->expected(2)->excludes(trunc);

  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "Solve across a lambda grid (CSV)");
  sweep->add_option("graph", graph)->required();
  sweep->add_option("problem", problem)->required();
  sweep->add_option("--lambda-grid", grid, "a:b:n")->required();
  sweep->add_option("--seed", seed)->capture_default_str();
  sweep->add_option("--budget", budget)->capture_default_str();

  std::optional<double> beta;
  std::optional<double> r0;
  auto* verify = app.add_subcommand("verify", "Check hypotheses of a problem");
  verify->add_option("graph", graph)->required();
  verify->add_option("problem", problem)->required();
  verify->add_option("--beta", beta, "AR exponent (overrides the document)");
  verify->add_option("--r0", r0, "AR threshold (overrides the document)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*info) return emit(graphell::cmd_info(graph));
  if (*l1) return emit(graphell::cmd_lambda1(graph));
  if (*lmp) return emit(graphell::cmd_lambda_mp(graph, m, p, seed));
  if (*solve) {
    graphell::SolveArgs a;
    a.graph_file = graph;
    a.problem_file = problem;
    a.seed = seed;
    a.budget = budget;
    a.mountain_pass = mode == "mountain-pass";
    a.truncate = truncate;
    if (!yamabe.empty()) a.yamabe = std::make_pair(yamabe[0], yamabe[1]);
    return emit(graphell::cmd_solve(a));
  }
  if (*sweep) {
    graphell::SweepArgs a;
    a.graph_file = graph;
    a.problem_file = problem;
    a.grid = grid;
    a.seed = seed;
    a.budget = budget;
    return emit(graphell::cmd_sweep(a));
  }
  graphell::VerifyArgs a;
  a.graph_file = graph;
  a.problem_file = problem;
  a.beta = beta;
  a.r0 = r0;
  return emit(graphell::cmd_verify(a));
}
