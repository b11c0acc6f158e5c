#include "graphell/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "graphell/documents.hpp"
#include "graphell/graph.hpp"
#include "graphell/higher_order.hpp"
#include "graphell/report.hpp"
#include "graphell/solvers.hpp"
#include "graphell/spectral.hpp"
#include "graphell/variational.hpp"

namespace graphell {

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParseError:
      return 2;
    case ErrorCode::NonPositiveMeasure:
    case ErrorCode::NegativeWeight:
    case ErrorCode::AsymmetricWeight:
    case ErrorCode::SelfLoop:
    case ErrorCode::UnknownVertex:
    case ErrorCode::EmptyInterior:
    case ErrorCode::EmptyBoundary:
    case ErrorCode::DisconnectedDomain:
    case ErrorCode::BoundaryDesignation:
    case ErrorCode::DomainMismatch:
    case ErrorCode::VertexOutsideDomain:
      return 3;
    case ErrorCode::TrivialConstraintClass:
      return 4;
    case ErrorCode::NonConvergence:
    case ErrorCode::NoInteriorMinimizer:
    case ErrorCode::OnlyTrivialFound:
      return 5;
    default:
      return 1;
  }
}

namespace {

CommandResult guarded(const std::function<std::string()>& body) {
  CommandResult r;
  try {
    r.out = body();
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e.code());
    r.err = std::string(e.what()) + "\n";
  } catch (const std::exception& e) {
    r.exit_code = 1;
    r.err = std::string(e.what()) + "\n";
  }
  return r;
}

struct Loaded {
  GraphDocument doc;
  DomainDecomp dom;
};

Loaded load_domain(const std::string& path) {
  GraphDocument doc = load_graph_file(path);
  DomainDecomp dom = decompose_domain(doc.graph, doc.domain, doc.boundary);
  return {std::move(doc), std::move(dom)};
}

Json id_list(const DomainDecomp& dom, const std::vector<std::size_t>& locals) {
  Json a = Json::array();
  for (std::size_t x : locals) a.push_back(dom.id(x));
  return a;
}

SolveOptions options_for(const ProblemDocument& p, std::uint64_t seed, std::size_t budget) {
  SolveOptions o;
  o.seed = seed;
  o.budget = budget;
  o.rho = p.rho;
  return o;
}

SolveReport solve_problem(const DomainDecomp& dom, const ProblemDocument& p, double lambda,
                          const SolveOptions& options, bool truncate) {
  if (p.order_m) {
    HigherOrderSpec hs;
    hs.dom = &dom;
    hs.m = *p.order_m;
    hs.p = *p.order_p;
    hs.f = &p.f;
    hs.lambda = lambda;
    hs.ar_beta = p.f.ar_beta();
    hs.ar_r0 = p.f.ar_r0();
    return mp_energy_and_solve(hs, options);
  }
  const ProblemSpec spec = make_spec(dom, p.alpha, p.f, lambda);
  return truncate ? solve_truncated(spec, options) : find_all_solutions(spec, options);
}

struct Grid {
  double a = 0.0;
  double b = 0.0;
  std::size_t n = 1;
};

double parse_double(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + s + "'");
  return v;
}

Grid parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw Error(ErrorCode::ParseError, "lambda grid must be a:b:n");
  Grid g;
  g.a = parse_double(text.substr(0, c1), "grid start");
  g.b = parse_double(text.substr(c1 + 1, c2 - c1 - 1), "grid end");
  const std::string ns = text.substr(c2 + 1);
  unsigned long long n = 0;
  auto [ptr, ec] = std::from_chars(ns.data(), ns.data() + ns.size(), n);
  if (ec != std::errc{} || ptr != ns.data() + ns.size() || n == 0) {
    throw Error(ErrorCode::ParseError, "grid count must be a positive integer");
  }
  g.n = static_cast<std::size_t>(n);
  if (g.n > 1 && !(g.b > g.a)) throw Error(ErrorCode::ParseError, "grid end must exceed its start");
  if (!(g.a > 0.0)) throw Error(ErrorCode::ParseError, "lambda values must be positive");
  return g;
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CommandResult cmd_info(const std::string& graph_file) {
  return guarded([&] {
    const Loaded l = load_domain(graph_file);
    const DomainDecomp& dom = l.dom;
    Json j;
    j["schema"] = 1;
    j["vertices"] = l.doc.graph->size();
    j["edges"] = l.doc.graph->edge_count();
    j["domain_size"] = dom.size();
    j["boundary_size"] = dom.boundary().size();
    j["interior_size"] = dom.interior().size();
    j["mu0"] = json_number(dom.mu0());
    j["volume"] = json_number(dom.volume());
    j["connected"] = true;
    j["explicit_boundary"] = dom.explicit_boundary();
    j["boundary"] = id_list(dom, dom.boundary());
    j["interior"] = id_list(dom, dom.interior());
    return dump(j);
  });
}

CommandResult cmd_lambda1(const std::string& graph_file) {
  return guarded([&] {
    const Loaded l = load_domain(graph_file);
    const EigenResult e = lambda1(l.dom);
    Json j;
    j["schema"] = 1;
    j["lambda1"] = json_number(e.lambda1);
    j["method"] = e.iterative ? "inverse_iteration" : "dense";
    j["residual"] = json_number(e.residual);
    j["eigenfunction"] = json_vertex_fn(l.dom, e.eigenfunction);
    return dump(j);
  });
}

CommandResult cmd_lambda_mp(const std::string& graph_file, std::size_t m, double p, std::uint64_t seed) {
  return guarded([&] {
    if (m == 0) throw Error(ErrorCode::InvalidArgument, "m must be positive");
    if (!(p > 1.0)) throw Error(ErrorCode::InvalidArgument, "p must exceed 1");
    const Loaded l = load_domain(graph_file);
    const LambdaMpResult r = lambda_mp(l.dom, m, p, seed);
    Json j;
    j["schema"] = 1;
    j["m"] = m;
    j["p"] = json_number(p);
    j["lambda_mp"] = json_number(r.value);
    j["heuristic"] = r.heuristic;
    j["converged"] = r.converged;
    j["restarts"] = r.restarts;
    j["best_restart"] = r.best_restart;
    j["seed"] = seed;
    j["certificate"] = json_vertex_fn(l.dom, r.certificate);
    return dump(j);
  });
}

CommandResult cmd_solve(const SolveArgs& args) {
  return guarded([&] {
    const Loaded l = load_domain(args.graph_file);
    const DomainDecomp& dom = l.dom;
    SolveOptions options;
    options.seed = args.seed;
    options.budget = args.budget;
    options.mode = args.mountain_pass ? SolveMode::MountainPass : SolveMode::Deflate;
    if (args.yamabe) {
      if (!args.problem_file.empty()) options.rho = load_problem_file(args.problem_file, dom).rho;
      return dump(to_json(dom, yamabe_solve(dom, args.yamabe->first, args.yamabe->second, options)));
    }
    if (args.problem_file.empty()) throw Error(ErrorCode::InvalidArgument, "solve needs a problem file");
    const ProblemDocument p = load_problem_file(args.problem_file, dom);
    options.rho = p.rho;
    return dump(to_json(dom, solve_problem(dom, p, p.lambda, options, args.truncate)));
  });
}

CommandResult cmd_sweep(const SweepArgs& args) {
  return guarded([&] {
    const Grid grid = parse_grid(args.grid);
    const Loaded l = load_domain(args.graph_file);
    const DomainDecomp& dom = l.dom;
    const ProblemDocument p = load_problem_file(args.problem_file, dom);
    const SolveOptions options = options_for(p, args.seed, args.budget);

    struct Row {
      double lambda = 0.0;
      std::size_t n = 0;
      double min_energy = std::numeric_limits<double>::quiet_NaN();
      double lambda_star = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> rows(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      rows[i].lambda = grid.n == 1 ? grid.a
                                   : grid.a + (grid.b - grid.a) * static_cast<double>(i) /
                                                  static_cast<double>(grid.n - 1);
    }
    // Failures other than nonconvergence abort the sweep after the loop.
    std::vector<std::exception_ptr> errors(grid.n);
    const auto count = static_cast<long long>(grid.n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
      Row& row = rows[static_cast<std::size_t>(i)];
      try {
        const SolveReport r = solve_problem(dom, p, row.lambda, options, false);
        row.n = r.solutions.size();
        row.lambda_star = r.lambda_star;
        bool any_nontrivial = false;
        for (const auto& s : r.solutions) any_nontrivial = any_nontrivial || !s.trivial;
        for (const auto& s : r.solutions) {
          if (any_nontrivial && s.trivial) continue;
          if (std::isnan(row.min_energy) || s.energy < row.min_energy) row.min_energy = s.energy;
        }
      } catch (const Error& e) {
        if (exit_code_for(e.code()) != 5) errors[static_cast<std::size_t>(i)] = std::current_exception();
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    double lstar = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : rows) {
      if (!std::isnan(row.lambda_star)) {
        lstar = row.lambda_star;
        break;
      }
    }
    if (std::isnan(lstar) && !p.order_m) lstar = lambda_star(make_spec(dom, p.alpha, p.f, p.lambda));
    std::ostringstream out;
    out << "lambda,n_solutions,min_energy,lambda_star,admissible\n";
    for (const auto& row : rows) {
      out << csv_double(row.lambda) << ',' << row.n << ',' << csv_double(row.min_energy) << ','
          << csv_double(lstar) << ',' << (row.lambda < lstar ? "true" : "false") << '\n';
    }
    return out.str();
  });
}

CommandResult cmd_verify(const VerifyArgs& args) {
  return guarded([&] {
    const Loaded l = load_domain(args.graph_file);
    const DomainDecomp& dom = l.dom;
    const ProblemDocument p = load_problem_file(args.problem_file, dom);
    const ProblemSpec spec = make_spec(dom, p.alpha, p.f, p.lambda);

    Json j;
    j["schema"] = 1;
    j["lambda1"] = json_number(spec.lambda1);
    j["mu0"] = json_number(dom.mu0());
    j["volume"] = json_number(dom.volume());
    Json alpha;
    alpha["regime"] = std::string(to_string(spec.alpha.regime));
    alpha["l1"] = json_number(spec.alpha.l1);
    alpha["small_l1_bound"] = json_number(dom.mu0() * dom.mu0() * spec.lambda1);
    alpha["invalid"] = spec.alpha.regime == AlphaRegime::Invalid;
    j["alpha"] = alpha;

    const bool vanishes = p.f.vanishes_at_origin(dom.interior());
    j["f_vanishes_at_origin"] = vanishes;
    j["notes"] = Json::array();
    if (!vanishes) j["notes"].push_back("f(x,0) != 0: the zero function is not a solution");

    const std::optional<double> beta = args.beta ? args.beta : p.f.ar_beta();
    const std::optional<double> r0 = args.r0 ? args.r0 : p.f.ar_r0();
    Json ar;
    bool ar_pass = false;
    if (beta && r0) {
      ar["checked"] = true;
      ar["beta"] = json_number(*beta);
      ar["r0"] = json_number(*r0);
      const ArCheck c = check_ar(dom, p.f, *beta, *r0);
      ar_pass = c.pass;
      ar["pass"] = c.pass;
      ar["asymptotic_pass"] = c.asymptotic_pass;
      ar["samples"] = c.samples;
      if (c.witness_vertex) {
        Json w;
        w["vertex"] = dom.id(*c.witness_vertex);
        w["t"] = json_number(c.witness_t.value_or(0.0));
        ar["witness"] = w;
      }
      if (!c.reason.empty()) ar["reason"] = c.reason;
      if (c.pass) {
        const SuperquadraticBounds sb = superquadratic_bounds(dom, p.f, *beta, *r0);
        ar["b1"] = json_number(sb.b1);
        ar["b2"] = json_number(sb.b2);
      }
    } else {
      ar["checked"] = false;
    }
    j["ar"] = ar;

    const F1lCheck f1l = check_f1l(dom, p.f, spec.lambda1);
    Json jf1l;
    jf1l["pass"] = f1l.pass;
    jf1l["limit"] = json_number(f1l.limit);
    j["f1l"] = jf1l;

    if (spec.alpha.regime != AlphaRegime::Invalid) {
      const CorollaryCheck cc = check_corollary(spec);
      Json jc;
      jc["condition"] = cc.condition;
      jc["max_f"] = json_number(cc.max_f);
      jc["f1_pass"] = cc.f1.pass;
      j["corollary"] = jc;
      const double ls = lambda_star(spec);
      j["kappa"] = json_number(kappa(spec));
      j["lambda_star"] = json_number(ls);
      j["lambda"] = json_number(p.lambda);
      j["lambda_below_star"] = p.lambda < ls;
      j["lambda_below_half_star"] = p.lambda < 0.5 * ls;
      Json ub;
      ub["checked"] = ar_pass;
      if (ar_pass) {
        const VertexFn u0 = from_interior(dom, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(dom.interior().size())));
        const auto t = unboundedness_witness(spec, u0);
        ub["found"] = t.has_value();
        if (t) ub["t"] = json_number(*t);
      }
      j["unboundedness"] = ub;
    }
    return dump(j);
  });
}

}  // namespace graphell
